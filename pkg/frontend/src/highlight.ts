/** Attention-weight highlighting for comment tokens.
 *
 * Softmax weights are only comparable within one comment, so intensities are
 * max-normalized per comment: the strongest token gets 1, everything else a
 * proportional share. The mapping is strictly monotone, so the visual
 * ordering of tokens always matches the model's attention ordering.
 */

import type { AttentionSpan } from './types.js';

export interface HighlightSpan {
  token: string;
  weight: number;
  /** weight / max weight within this comment, in [0, 1]. */
  intensity: number;
}

/**
 * Per-comment max-normalized highlight spans, in original token order.
 * Returns null when the scoring variant produced no attention (plain text).
 */
export function highlightSpans(attention: AttentionSpan[] | null | undefined): HighlightSpan[] | null {
  if (attention == null || attention.length === 0) {
    return null;
  }
  let max = 0;
  for (const span of attention) {
    if (span.weight > max) {
      max = span.weight;
    }
  }
  return attention.map((span) => ({
    token: span.token,
    weight: span.weight,
    intensity: max > 0 ? span.weight / max : 0,
  }));
}
