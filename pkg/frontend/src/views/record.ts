/** Record page: styled summary rows with a toggle to the plain-text view. */

import { ApiClient, ApiRequestError, RecordSummary } from '../api.js';
import { clear, el } from '../dom.js';

type Style = 'summary' | 'fgdc_text';

export class RecordView {
  private style: Style = 'summary';
  private summary: RecordSummary | null = null;
  private fullText: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly recordId: string,
    private readonly onBack: () => void,
  ) {}

  async show(): Promise<void> {
    try {
      this.summary = await this.api.recordSummary(this.recordId);
    } catch (err) {
      clear(this.root);
      const message =
        err instanceof ApiRequestError && err.status === 404
          ? `No record with id ${this.recordId}`
          : `Failed to load record: ${(err as Error).message}`;
      this.root.append(el('div', { class: 'error' }, message));
      return;
    }
    this.render();
  }

  private async toggle(style: Style): Promise<void> {
    this.style = style;
    if (style === 'fgdc_text' && this.fullText === null) {
      this.fullText = await this.api.recordFullText(this.recordId);
    }
    this.render();
  }

  private render(): void {
    clear(this.root);
    const summaryButton = el('button', { onclick: () => void this.toggle('summary') }, 'Summary');
    const textButton = el('button', { onclick: () => void this.toggle('fgdc_text') }, 'Plain text');
    (this.style === 'summary' ? summaryButton : textButton).setAttribute('disabled', 'disabled');
    const bar = el(
      'div',
      { class: 'record-toolbar' },
      el('button', { onclick: () => this.onBack() }, 'Back to results'),
      ' Style: ', summaryButton, ' ', textButton,
    );
    this.root.append(bar);
    if (this.style === 'summary' && this.summary) {
      const table = el('table', { class: 'record-summary' });
      let dataLink: string | null = null;
      for (const row of this.summary.rows) {
        if (row.label === 'Links') {
          const match = row.value.match(/Get data: (\S+)/);
          if (match) dataLink = match[1];
        }
        table.append(el('tr', {}, el('th', {}, row.label), el('td', {}, row.value)));
      }
      this.root.append(table);
      if (dataLink) {
        this.root.append(el('a', { class: 'button', href: dataLink, target: '_blank' }, 'Get data'));
      }
    } else if (this.fullText !== null) {
      this.root.append(el('pre', { class: 'record-text' }, this.fullText));
    }
  }
}
