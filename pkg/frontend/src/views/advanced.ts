/**
 * Advanced search form: keywords, time period, spatial extent as four
 * numeric box edges, and the data-provider multi-select. Blank inputs are
 * omitted from the request; validation mirrors the server's rules.
 */

import { FacetEntry } from '../api.js';
import { clear, el } from '../dom.js';
import {
  AdvancedForm,
  EMPTY_FORM,
  buildAdvancedQuery,
  buildBboxParam,
  checkAdvancedForm,
  formIsEmpty,
} from '../query.js';
import { DEFAULT_STATE, UiSearchState } from '../state.js';

export class AdvancedFormView {
  constructor(
    private readonly root: HTMLElement,
    private readonly providers: FacetEntry[],
    private readonly onSubmit: (state: UiSearchState) => void,
  ) {}

  show(): void {
    clear(this.root);
    const form: AdvancedForm = { ...EMPTY_FORM, providers: [] };
    const message = el('div', { class: 'form-messages' });
    const submit = el('button', { class: 'primary' }, 'Search');
    submit.setAttribute('disabled', 'disabled');

    const refresh = () => {
      const { errors, hints } = checkAdvancedForm(form);
      clear(message);
      for (const error of errors) message.append(el('div', { class: 'error' }, error));
      for (const hint of hints) message.append(el('div', { class: 'hint' }, hint));
      if (formIsEmpty(form) || errors.length) {
        submit.setAttribute('disabled', 'disabled');
      } else {
        submit.removeAttribute('disabled');
      }
    };

    const textInput = (label: string, apply: (v: string) => void, placeholder = '') => {
      const input = el('input', { type: 'text', placeholder });
      input.addEventListener('input', () => { apply(input.value); refresh(); });
      return el('label', { class: 'form-row' }, label, input);
    };

    const providerBoxes = el('fieldset', { class: 'providers' }, el('legend', {}, 'Data providers'));
    for (const provider of this.providers) {
      const box = el('input', { type: 'checkbox', value: provider.value });
      box.addEventListener('change', () => {
        form.providers = form.providers.filter((p) => p !== provider.value);
        if ((box as HTMLInputElement).checked) form.providers.push(provider.value);
        refresh();
      });
      providerBoxes.append(el('label', { class: 'provider' }, box, ` ${provider.label}`));
    }

    const node = el(
      'form',
      {
        class: 'advanced-form',
        onsubmit: (ev) => {
          ev.preventDefault();
          const { errors } = checkAdvancedForm(form);
          if (errors.length || formIsEmpty(form)) return;
          this.onSubmit({
            ...DEFAULT_STATE,
            q: buildAdvancedQuery(form),
            dateStart: form.dateStart,
            dateEnd: form.dateEnd,
            bbox: buildBboxParam(form) ?? '',
            matchAll: !buildAdvancedQuery(form),
          });
        },
      },
      el('h2', {}, 'Advanced search'),
      textInput('Keywords', (v) => { form.keywords = v; }, 'e.g. carbon flux'),
      providerBoxes,
      el(
        'fieldset',
        {},
        el('legend', {}, 'Time period'),
        textInput('From', (v) => { form.dateStart = v; }, 'YYYY-MM-DD'),
        textInput('To', (v) => { form.dateEnd = v; }, 'YYYY-MM-DD'),
      ),
      el(
        'fieldset',
        {},
        el('legend', {}, 'Spatial extent (decimal degrees)'),
        textInput('West', (v) => { form.west = v; }),
        textInput('South', (v) => { form.south = v; }),
        textInput('East', (v) => { form.east = v; }),
        textInput('North', (v) => { form.north = v; }),
      ),
      message,
      submit,
    );
    this.root.append(node);
  }
}
