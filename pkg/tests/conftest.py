import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_cases():
    cases = []
    for xml_path in sorted(FIXTURES.rglob("*.xml")):
        golden_path = xml_path.with_suffix("").with_suffix(".expected.json")
        if golden_path.exists():
            cases.append((xml_path, golden_path))
    return cases


@pytest.fixture(scope="session")
def all_fixture_cases():
    cases = fixture_cases()
    assert len(cases) >= 12, "expected at least 3 fixtures per standard"
    return cases


def load_golden(path: Path) -> dict:
    return json.loads(path.read_text("utf-8"))
