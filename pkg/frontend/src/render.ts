/** HTML renderers: pure functions from state to markup strings.
 *
 * Keeping these pure (no DOM reads) makes the view testable under node and
 * trivial to re-render wholesale after every state change.
 */

import { CoverageControl } from './coverage.js';
import { highlightSpans } from './highlight.js';
import type { QueueState } from './queueStore.js';
import type { Metrics, QueueItem } from './types.js';

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

/** Tokens with attention get a per-token alpha; plain text otherwise. */
export function renderCommentBody(item: QueueItem): string {
  const spans = highlightSpans(item.attention);
  if (spans === null) {
    return `<p class="comment-text">${escapeHtml(item.text)}</p>`;
  }
  const parts = spans.map(
    (s) =>
      `<span class="tok" data-weight="${s.weight}" ` +
      `style="background: rgba(217, 83, 25, ${(0.85 * s.intensity).toFixed(4)})">` +
      `${escapeHtml(s.token)}</span>`,
  );
  return `<p class="comment-tokens">${parts.join(' ')}</p>`;
}

export function renderItem(item: QueueItem): string {
  return `
  <article class="item" data-id="${escapeHtml(item.id)}">
    <header>
      <span class="item-id">${escapeHtml(item.id)}</span>
      <span class="item-p">p(reject) = ${item.p.toFixed(3)}</span>
      <time>ts ${item.ts}</time>
    </header>
    ${renderCommentBody(item)}
    <footer>
      <button data-action="decide" data-id="${escapeHtml(item.id)}" data-label="accept">Accept</button>
      <button data-action="decide" data-id="${escapeHtml(item.id)}" data-label="reject">Reject</button>
    </footer>
  </article>`;
}

export function renderQueue(state: QueueState): string {
  const notices = state.notices
    .map(
      (n) =>
        `<div class="notice" data-id="${escapeHtml(n.id)}">` +
        `${escapeHtml(n.id)}: ${escapeHtml(n.message)}` +
        (n.finalDecision ? ` (recorded as ${escapeHtml(n.finalDecision)})` : '') +
        ` <button data-action="dismiss" data-id="${escapeHtml(n.id)}">dismiss</button></div>`,
    )
    .join('');
  const banner = state.error
    ? `<div class="banner error">` +
      `${escapeHtml(state.error)} <button data-action="retry">Retry</button></div>`
    : '';
  if (state.items.length === 0) {
    return `${banner}${notices}<p class="empty">No comments waiting for review.</p>`;
  }
  const pageEnd = Math.min(state.offset + state.items.length, state.total);
  return `
  ${banner}${notices}
  <div class="queue-meta">${state.total} pending; showing ${state.offset + 1}-${pageEnd}</div>
  ${state.items.map(renderItem).join('\n')}
  <nav class="pager">
    <button data-action="prev" ${state.offset === 0 ? 'disabled' : ''}>Newer</button>
    <button data-action="next" ${pageEnd >= state.total ? 'disabled' : ''}>Older</button>
  </nav>`;
}

export function renderCoverage(control: CoverageControl): string {
  const th = control.current;
  const workload = control.projectedWorkload;
  const workloadLine =
    workload === null
      ? '<span class="workload">workload projection unavailable (no dev set registered)</span>'
      : `<span class="workload">projected workload: <strong>${workload}</strong></span>`;
  const fullAuto =
    th && th.coverage === 1.0
      ? '<p class="full-auto">fully automatic, 0% to review</p>'
      : '';
  const confirmBox =
    control.stage === 'confirming'
      ? `<div class="confirm">Re-tune thresholds for coverage ${control.pendingValue}?
           <button data-action="coverage-confirm">Confirm</button>
           <button data-action="coverage-cancel">Cancel</button>
         </div>`
      : '';
  const status = th
    ? `<dl class="thresholds">
         <dt>t_a</dt><dd>${th.t_a.toFixed(4)}</dd>
         <dt>t_r</dt><dd>${th.t_r.toFixed(4)}</dd>
         <dt>coverage</dt><dd>${th.coverage}</dd>
         <dt>dev macro-F${th.beta}</dt><dd>${th.dev_macro_f_beta.toFixed(4)}</dd>
       </dl>`
    : '<p>thresholds not loaded</p>';
  const error = control.error ? `<div class="banner error">${escapeHtml(control.error)}</div>` : '';
  return `
  <section class="coverage">
    <h2>Coverage</h2>
    ${error}${status}${workloadLine}${fullAuto}
    <input type="range" min="0.05" max="1" step="0.05" value="${control.value}"
           data-action="coverage-slide" ${control.stage === 'applying' ? 'disabled' : ''}/>
    ${confirmBox}
  </section>`;
}

export function renderMetrics(m: Metrics): string {
  const fmt = (x: number | null) => (x === null ? '-' : x.toFixed(4));
  return `
  <section class="metrics">
    <h2>Live metrics</h2>
    <dl>
      <dt>P_accept</dt><dd>${fmt(m.p_accept)}</dd>
      <dt>P_reject</dt><dd>${fmt(m.p_reject)}</dd>
      <dt>AUC</dt><dd>${fmt(m.auc)}</dd>
      <dt>Spearman</dt><dd>${fmt(m.spearman)}</dd>
      <dt>audited</dt><dd>${m.n_audited}</dd>
    </dl>
    <dl class="counters">
      ${Object.entries(m.counters)
        .map(([k, v]) => `<dt>${escapeHtml(k)}</dt><dd>${v}</dd>`)
        .join('')}
    </dl>
  </section>`;
}
