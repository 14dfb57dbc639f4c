/** Gray-queue state: loading, pagination, and optimistic decisions.
 *
 * A decision click removes the item from the visible list immediately and
 * fires the API call in the background:
 *   - success: the service confirms human_accept / human_reject, done;
 *   - 409 conflict: another moderator got there first; the item's recorded
 *     state is reloaded and surfaced as an inline notice;
 *   - network failure: the item is restored at its original position and a
 *     retry banner appears. Nothing else about the view is touched.
 * Repeat clicks while a decision is in flight are ignored (the API itself is
 * idempotent for same-label repeats, so a late double submit is harmless).
 */

import { ApiClient, ApiError } from './api.js';
import type { Decision, Label, QueueItem } from './types.js';

export interface ConflictNotice {
  id: string;
  message: string;
  finalDecision: Decision | null;
}

export interface QueueState {
  items: QueueItem[];
  total: number;
  offset: number;
  limit: number;
  loading: boolean;
  /** Retry-banner text; null when the last request succeeded. */
  error: string | null;
  notices: ConflictNotice[];
}

export class QueueStore {
  state: QueueState;
  private inflight = new Set<string>();
  private listeners: Array<(s: QueueState) => void> = [];

  constructor(
    private readonly api: ApiClient,
    limit = 20,
    private readonly moderator = 'moderator',
  ) {
    this.state = {
      items: [],
      total: 0,
      offset: 0,
      limit,
      loading: false,
      error: null,
      notices: [],
    };
  }

  onChange(fn: (s: QueueState) => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) {
      fn(this.state);
    }
  }

  /** Fetch one page; on failure the current view survives behind the banner. */
  async load(offset = this.state.offset): Promise<void> {
    this.state.loading = true;
    this.emit();
    try {
      const page = await this.api.fetchQueue(this.state.limit, offset);
      this.state.items = page.items;
      this.state.total = page.total;
      this.state.offset = offset;
      this.state.error = null;
    } catch (err) {
      this.state.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.state.loading = false;
      this.emit();
    }
  }

  async nextPage(): Promise<void> {
    if (this.state.offset + this.state.limit < this.state.total) {
      await this.load(this.state.offset + this.state.limit);
    }
  }

  async prevPage(): Promise<void> {
    await this.load(Math.max(0, this.state.offset - this.state.limit));
  }

  /** Optimistically decide one pending item. */
  async submitDecision(id: string, label: Label): Promise<void> {
    if (this.inflight.has(id)) {
      return; // double-click guard
    }
    const index = this.state.items.findIndex((it) => it.id === id);
    if (index < 0) {
      return;
    }
    const snapshot = this.state.items[index] as QueueItem;
    this.inflight.add(id);
    this.state.items = this.state.items.filter((it) => it.id !== id);
    this.state.total = Math.max(0, this.state.total - 1);
    this.emit();
    try {
      await this.api.submitDecision(id, label, this.moderator);
      this.state.error = null;
    } catch (err) {
      if (err instanceof ApiError && err.isConflict) {
        await this.reconcileConflict(id, err);
      } else if (err instanceof ApiError && err.isNotFound) {
        this.state.notices.push({ id, message: err.message, finalDecision: null });
      } else {
        // network trouble: undo the optimistic removal, keep everything else
        const restored = [...this.state.items];
        restored.splice(Math.min(index, restored.length), 0, snapshot);
        this.state.items = restored;
        this.state.total += 1;
        this.state.error = err instanceof Error ? err.message : String(err);
      }
    } finally {
      this.inflight.delete(id);
      this.emit();
    }
  }

  /** Another moderator decided first: show the recorded final state. */
  private async reconcileConflict(id: string, err: ApiError): Promise<void> {
    let finalDecision: Decision | null = null;
    try {
      finalDecision = (await this.api.getItem(id)).decision;
    } catch {
      // the notice still renders with the conflict message alone
    }
    this.state.notices.push({
      id,
      message: err.message,
      finalDecision,
    });
  }

  dismissNotice(id: string): void {
    this.state.notices = this.state.notices.filter((n) => n.id !== id);
    this.emit();
  }
}
