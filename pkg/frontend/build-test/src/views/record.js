/** Record page: styled summary rows with a toggle to the plain-text view. */
import { ApiRequestError } from '../api.js';
import { clear, el } from '../dom.js';
export class RecordView {
    root;
    api;
    recordId;
    onBack;
    style = 'summary';
    summary = null;
    fullText = null;
    constructor(root, api, recordId, onBack) {
        this.root = root;
        this.api = api;
        this.recordId = recordId;
        this.onBack = onBack;
    }
    async show() {
        try {
            this.summary = await this.api.recordSummary(this.recordId);
        }
        catch (err) {
            clear(this.root);
            const message = err instanceof ApiRequestError && err.status === 404
                ? `No record with id ${this.recordId}`
                : `Failed to load record: ${err.message}`;
            this.root.append(el('div', { class: 'error' }, message));
            return;
        }
        this.render();
    }
    async toggle(style) {
        this.style = style;
        if (style === 'fgdc_text' && this.fullText === null) {
            this.fullText = await this.api.recordFullText(this.recordId);
        }
        this.render();
    }
    render() {
        clear(this.root);
        const summaryButton = el('button', { onclick: () => void this.toggle('summary') }, 'Summary');
        const textButton = el('button', { onclick: () => void this.toggle('fgdc_text') }, 'Plain text');
        (this.style === 'summary' ? summaryButton : textButton).setAttribute('disabled', 'disabled');
        const bar = el('div', { class: 'record-toolbar' }, el('button', { onclick: () => this.onBack() }, 'Back to results'), ' Style: ', summaryButton, ' ', textButton);
        this.root.append(bar);
        if (this.style === 'summary' && this.summary) {
            const table = el('table', { class: 'record-summary' });
            let dataLink = null;
            for (const row of this.summary.rows) {
                if (row.label === 'Links') {
                    const match = row.value.match(/Get data: (\S+)/);
                    if (match)
                        dataLink = match[1];
                }
                table.append(el('tr', {}, el('th', {}, row.label), el('td', {}, row.value)));
            }
            this.root.append(table);
            if (dataLink) {
                this.root.append(el('a', { class: 'button', href: dataLink, target: '_blank' }, 'Get data'));
            }
        }
        else if (this.fullText !== null) {
            this.root.append(el('pre', { class: 'record-text' }, this.fullText));
        }
    }
}
