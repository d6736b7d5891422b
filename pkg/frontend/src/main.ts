// Browser bootstrap. The API origin comes from a global set in
// index.html (or defaults to same-origin, for serving behind a proxy).

import { ApiClient } from './api.js';
import { ExplorerApp } from './app.js';

declare global {
  interface Window {
    P3_API_BASE?: string;
  }
}

const root = document.getElementById('app');
if (root) {
  const base = window.P3_API_BASE ?? '';
  const api = new ApiClient(base, (input, init) => fetch(input, init));
  const app = new ExplorerApp(root, api, window);
  void app.start();
}
