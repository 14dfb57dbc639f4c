/** Coverage control: pick a coverage, confirm, re-tune, show the workload.
 *
 * Changing coverage re-tunes thresholds service-wide, so the control is
 * two-step: the slider arms a pending value, and only an explicit confirm
 * issues the PUT. Cancel sends nothing. The displayed workload is the
 * service's projected_workload field, passed through untouched.
 */

import { ApiClient } from './api.js';
import type { Thresholds } from './types.js';

export type CoverageStage = 'idle' | 'confirming' | 'applying';

export class CoverageControl {
  /** Slider position, in (0, 1]. */
  value = 1.0;
  pendingValue: number | null = null;
  stage: CoverageStage = 'idle';
  current: Thresholds | null = null;
  error: string | null = null;
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(fn: () => void): void {
    this.listeners.push(fn);
  }

  private emit(): void {
    for (const fn of this.listeners) {
      fn();
    }
  }

  /** The service-reported workload fraction, verbatim (null before tuning). */
  get projectedWorkload(): number | null {
    return this.current ? this.current.projected_workload : null;
  }

  async refresh(): Promise<void> {
    try {
      this.current = await this.api.getThresholds();
      this.value = this.current.coverage;
      this.error = null;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    }
    this.emit();
  }

  /** Arm a new coverage value; nothing is sent until confirm(). */
  begin(value: number): void {
    if (!(value > 0 && value <= 1)) {
      throw new RangeError('coverage must lie in (0, 1]');
    }
    this.pendingValue = value;
    this.stage = 'confirming';
    this.emit();
  }

  cancel(): void {
    this.pendingValue = null;
    this.stage = 'idle';
    this.emit();
  }

  async confirm(): Promise<void> {
    if (this.stage !== 'confirming' || this.pendingValue == null) {
      return;
    }
    this.stage = 'applying';
    this.emit();
    try {
      this.current = await this.api.setCoverage(this.pendingValue);
      this.value = this.pendingValue;
      this.error = null;
    } catch (err) {
      this.error = err instanceof Error ? err.message : String(err);
    } finally {
      this.pendingValue = null;
      this.stage = 'idle';
      this.emit();
    }
  }
}
