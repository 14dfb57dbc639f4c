/** Browser bootstrap: wires the stores to the DOM and polls the queue.
 *
 * The page needs three containers (#queue, #coverage, #metrics) and a
 * service base URL, taken from ?service=... or defaulting to same-origin.
 */

import { ApiClient } from './api.js';
import { CoverageControl } from './coverage.js';
import { QueueStore } from './queueStore.js';
import { renderCoverage, renderMetrics, renderQueue } from './render.js';

const POLL_INTERVAL_MS = 5000;

export function startApp(doc: Document, baseUrl: string): { stop: () => void } {
  const api = new ApiClient(baseUrl);
  const queue = new QueueStore(api);
  const coverage = new CoverageControl(api);

  const queueEl = doc.querySelector('#queue') as HTMLElement;
  const coverageEl = doc.querySelector('#coverage') as HTMLElement;
  const metricsEl = doc.querySelector('#metrics') as HTMLElement;

  queue.onChange((state) => {
    queueEl.innerHTML = renderQueue(state);
  });
  coverage.onChange(() => {
    coverageEl.innerHTML = renderCoverage(coverage);
  });

  async function refreshMetrics(): Promise<void> {
    try {
      metricsEl.innerHTML = renderMetrics(await api.getMetrics());
    } catch {
      // metrics are advisory; the queue banner reports connectivity trouble
    }
  }

  doc.addEventListener('click', (ev) => {
    const el = (ev.target as HTMLElement).closest('[data-action]') as HTMLElement | null;
    if (!el) {
      return;
    }
    const action = el.dataset.action;
    if (action === 'decide') {
      void queue
        .submitDecision(el.dataset.id as string, el.dataset.label as 'accept' | 'reject')
        .then(refreshMetrics);
    } else if (action === 'dismiss') {
      queue.dismissNotice(el.dataset.id as string);
    } else if (action === 'retry') {
      void queue.load();
    } else if (action === 'prev') {
      void queue.prevPage();
    } else if (action === 'next') {
      void queue.nextPage();
    } else if (action === 'coverage-confirm') {
      void coverage.confirm().then(() => queue.load());
    } else if (action === 'coverage-cancel') {
      coverage.cancel();
    }
  });

  doc.addEventListener('change', (ev) => {
    const el = ev.target as HTMLInputElement;
    if (el.dataset.action === 'coverage-slide') {
      coverage.begin(parseFloat(el.value));
    }
  });

  void queue.load();
  void coverage.refresh();
  void refreshMetrics();
  const timer = setInterval(() => {
    void queue.load();
    void refreshMetrics();
  }, POLL_INTERVAL_MS);

  return { stop: () => clearInterval(timer) };
}

declare const window: any;
if (typeof window !== 'undefined' && typeof window.document !== 'undefined') {
  const params = new URLSearchParams(window.location.search);
  const base = params.get('service') ?? '';
  window.addEventListener('DOMContentLoaded', () => startApp(window.document, base));
}
