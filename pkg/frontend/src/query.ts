/**
 * Query-string construction: facet refinement and the advanced-search
 * form. The UI never parses queries; it only appends well-formed clauses
 * in the canonical textual form the server renders.
 */

export const appendFacetClause = (q: string, field: string, value: string): string => {
  const clause = `${field}:${value}`;
  const base = q.trim();
  return base ? `${base} AND ${clause}` : clause;
};

export interface AdvancedForm {
  keywords: string;
  providers: string[];
  dateStart: string;
  dateEnd: string;
  west: string;
  south: string;
  east: string;
  north: string;
}

export const EMPTY_FORM: AdvancedForm = {
  keywords: '',
  providers: [],
  dateStart: '',
  dateEnd: '',
  west: '',
  south: '',
  east: '',
  north: '',
};

export const buildAdvancedQuery = (form: AdvancedForm): string => {
  const parts: string[] = [];
  const keywords = form.keywords.trim();
  if (keywords) parts.push(keywords);
  if (form.providers.length === 1) parts.push(`datasource:${form.providers[0]}`);
  if (form.providers.length > 1) parts.push(`datasource:(${form.providers.join(' ')})`);
  return parts.join(' AND ');
};

const bboxFieldsUsed = (form: AdvancedForm): boolean =>
  [form.west, form.south, form.east, form.north].some((v) => v.trim() !== '');

export const buildBboxParam = (form: AdvancedForm): string | undefined => {
  if (!bboxFieldsUsed(form)) return undefined;
  return [form.west, form.south, form.east, form.north].map((v) => v.trim()).join(',');
};

export const formIsEmpty = (form: AdvancedForm): boolean =>
  !form.keywords.trim() && form.providers.length === 0 && !form.dateStart && !form.dateEnd &&
  !bboxFieldsUsed(form);

export interface FormCheck {
  errors: string[];
  hints: string[];
}

const ISO_DATE = /^\d{4}-\d{2}-\d{2}$/;

/** Client-side validation mirroring the server's rules. A west edge east
 * of the east edge is legal (antimeridian crossing) and only hinted. */
export const checkAdvancedForm = (form: AdvancedForm): FormCheck => {
  const errors: string[] = [];
  const hints: string[] = [];
  for (const [label, value] of [['Start date', form.dateStart], ['End date', form.dateEnd]] as const) {
    if (value && !ISO_DATE.test(value)) errors.push(`${label} must be YYYY-MM-DD`);
  }
  if (
    form.dateStart && form.dateEnd &&
    ISO_DATE.test(form.dateStart) && ISO_DATE.test(form.dateEnd) &&
    form.dateStart > form.dateEnd
  ) {
    errors.push('Start date is after end date');
  }
  if (bboxFieldsUsed(form)) {
    const sides: [string, string, number, number][] = [
      ['West', form.west, -180, 180],
      ['South', form.south, -90, 90],
      ['East', form.east, -180, 180],
      ['North', form.north, -90, 90],
    ];
    const values: Record<string, number> = {};
    for (const [label, raw, lo, hi] of sides) {
      const value = Number.parseFloat(raw);
      if (raw.trim() === '' || !Number.isFinite(value)) {
        errors.push(`${label} must be a number (all four box edges are required)`);
        continue;
      }
      if (value < lo || value > hi) errors.push(`${label} must be between ${lo} and ${hi}`);
      values[label] = value;
    }
    if ('South' in values && 'North' in values && values.South > values.North) {
      errors.push('South must not exceed north');
    }
    if ('West' in values && 'East' in values && values.West > values.East) {
      hints.push('West is east of east: the box crosses the antimeridian');
    }
  }
  return { errors, hints };
};
