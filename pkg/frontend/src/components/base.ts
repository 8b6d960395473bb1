// Shared base: a panel that re-renders whenever the store changes.

import { LitElement } from "lit";
import type { Store } from "../store.js";

export class StoreConnected extends LitElement {
  declare store: Store;
  private unsubscribe: (() => void) | null = null;

  static override properties = {
    store: { attribute: false },
  };

  override connectedCallback(): void {
    super.connectedCallback();
    if (this.store) {
      this.unsubscribe = this.store.subscribe(() => this.requestUpdate());
    }
  }

  override disconnectedCallback(): void {
    super.disconnectedCallback();
    this.unsubscribe?.();
    this.unsubscribe = null;
  }
}
