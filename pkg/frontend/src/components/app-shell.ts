import { css, html } from "lit";
import { StoreConnected } from "./base.js";
import "./model-panel.js";
import "./retrieval-panel.js";
import "./blueprint-panel.js";

export class AppShell extends StoreConnected {
  static override styles = css`
    :host {
      display: grid;
      grid-template-columns: 180px 1fr 1fr;
      gap: 1rem;
      padding: 1rem;
      font-family: system-ui, sans-serif;
      background: #fafafa;
      min-height: 100vh;
      box-sizing: border-box;
    }
    header {
      grid-column: 1 / -1;
      display: flex;
      align-items: baseline;
      gap: 0.75rem;
    }
    h1 {
      margin: 0;
      font-size: 1.2rem;
    }
    .tag {
      font-size: 0.8rem;
      color: #777;
    }
  `;

  override render() {
    return html`
      <header>
        <h1>plansum</h1>
        <span class="tag">edit the plan, steer the summary</span>
      </header>
      <model-panel .store=${this.store}></model-panel>
      <retrieval-panel .store=${this.store}></retrieval-panel>
      <blueprint-panel .store=${this.store}></blueprint-panel>
    `;
  }
}

if (!customElements.get("plansum-app")) {
  customElements.define("plansum-app", AppShell);
}
