/**
 * Keyword browse tree: children load lazily from /api/browse, exactly one
 * request per first expansion (expansions are cached); clicking a leaf
 * runs a keyword search for it.
 */

import { ApiClient, BrowseChild } from '../api.js';
import { clear, el } from '../dom.js';

export class BrowseTreeView {
  private readonly loaded = new Map<string, BrowseChild[]>();

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly onLeaf: (path: string[]) => void,
  ) {}

  async show(): Promise<void> {
    clear(this.root);
    this.root.append(el('h2', {}, 'Browse by keyword'));
    const rootList = el('ul', { class: 'tree' });
    this.root.append(rootList);
    await this.expandInto(rootList, []);
  }

  private async children(path: string[]): Promise<BrowseChild[]> {
    const key = path.join('/');
    const cached = this.loaded.get(key);
    if (cached) return cached;
    const node = await this.api.browse(path);
    this.loaded.set(key, node.children);
    return node.children;
  }

  private async expandInto(list: HTMLElement, path: string[]): Promise<void> {
    let children: BrowseChild[];
    try {
      children = await this.children(path);
    } catch (err) {
      const retry = el(
        'li',
        {},
        el('span', { class: 'error' }, `Failed to load: ${(err as Error).message} `),
        el('a', { href: '#', onclick: (ev) => { ev.preventDefault(); void this.expandInto(list, path); } }, 'retry'),
      );
      clear(list);
      list.append(retry);
      return;
    }
    clear(list);
    if (!children.length) list.append(el('li', { class: 'tree-empty' }, '(no keywords)'));
    for (const child of children) {
      const item = el('li', {});
      const childPath = [...path, child.segment];
      const label = `${child.segment} (${child.count})`;
      if (child.has_children) {
        let expanded = false;
        const sub = el('ul', { class: 'tree hidden' });
        const toggle = el(
          'a',
          {
            href: '#',
            class: 'tree-node',
            onclick: (ev) => {
              ev.preventDefault();
              expanded = !expanded;
              sub.classList.toggle('hidden', !expanded);
              if (expanded && !sub.childElementCount) void this.expandInto(sub, childPath);
            },
          },
          `+ ${label}`,
        );
        item.append(toggle, sub);
      } else {
        item.append(
          el(
            'a',
            {
              href: '#',
              class: 'tree-leaf',
              onclick: (ev) => { ev.preventDefault(); this.onLeaf(childPath); },
            },
            label,
          ),
        );
      }
      list.append(item);
    }
  }
}
