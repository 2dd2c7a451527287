import { ApiClient } from './api.js';
import { App } from './app.js';

const root = document.getElementById('view');
const searchBox = document.getElementById('q') as HTMLInputElement | null;
const searchForm = document.getElementById('search-form') as HTMLFormElement | null;
const advancedLink = document.getElementById('nav-advanced');
const browseLink = document.getElementById('nav-browse');

if (!root || !searchBox || !searchForm) {
  throw new Error('page shell is missing expected elements');
}

const app = new App(root, searchBox, new ApiClient(''));

searchForm.addEventListener('submit', (ev) => {
  ev.preventDefault();
  app.submitSimpleSearch(searchBox.value);
});
advancedLink?.addEventListener('click', (ev) => {
  ev.preventDefault();
  app.navigate({ view: 'advanced', state: { q: '', dateStart: '', dateEnd: '', bbox: '', sort: 'index_rank', start: 0, rows: 10, matchAll: false } });
});
browseLink?.addEventListener('click', (ev) => {
  ev.preventDefault();
  app.navigate({ view: 'browse', state: { q: '', dateStart: '', dateEnd: '', bbox: '', sort: 'index_rank', start: 0, rows: 10, matchAll: false } });
});

app.start();
