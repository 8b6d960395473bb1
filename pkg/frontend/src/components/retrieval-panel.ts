import { css, html } from "lit";
import { StoreConnected } from "./base.js";

export class RetrievalPanel extends StoreConnected {
  static override styles = css`
    :host {
      display: flex;
      flex-direction: column;
      min-height: 0;
    }
    form {
      display: flex;
      gap: 0.5rem;
    }
    input[type="search"] {
      flex: 1;
      padding: 0.5rem;
      border: 1px solid #ccc;
      border-radius: 6px;
    }
    .error {
      color: #d93025;
      font-size: 0.85rem;
      margin-top: 0.25rem;
    }
    nav {
      display: flex;
      gap: 0.25rem;
      margin-top: 0.75rem;
      flex-wrap: wrap;
    }
    nav button {
      border: 1px solid #ccc;
      border-bottom: none;
      border-radius: 6px 6px 0 0;
      background: #f1f3f4;
      padding: 0.35rem 0.7rem;
      cursor: pointer;
    }
    nav button[data-active="true"] {
      background: #fff;
      font-weight: 600;
    }
    article {
      border: 1px solid #ccc;
      border-radius: 0 6px 6px 6px;
      padding: 0.75rem;
      overflow-y: auto;
      flex: 1;
      min-height: 8rem;
      max-height: 24rem;
      background: #fff;
    }
    .url {
      font-size: 0.8rem;
      color: #1a73e8;
      word-break: break-all;
      margin-bottom: 0.5rem;
    }
    button:disabled {
      opacity: 0.5;
    }
  `;

  private submit(event: Event): void {
    event.preventDefault();
    const input = this.renderRoot.querySelector<HTMLInputElement>("#query");
    if (input) void this.store.search(input.value);
  }

  override render() {
    const state = this.store.state;
    const active = state.documents[state.activeTab];
    return html`
      <form @submit=${(e: Event) => this.submit(e)}>
        <input
          id="query"
          type="search"
          placeholder="Ask a question, e.g. What is the Titanic known for?"
          ?disabled=${state.pending}
        />
        <button id="search" type="submit" ?disabled=${state.pending}>Search</button>
      </form>
      ${state.error ? html`<div class="error">${state.error}</div>` : null}
      ${state.documents.length
        ? html`
            <nav>
              ${state.documents.map(
                (doc, index) => html`
                  <button
                    data-active=${String(index === state.activeTab)}
                    ?disabled=${state.pending}
                    @click=${() => this.store.selectTab(index)}
                  >
                    ${doc.title || `doc ${doc.doc_id}`}
                  </button>
                `,
              )}
            </nav>
            <article>
              <div class="url">${active?.url}</div>
              <div>${active?.body}</div>
            </article>
          `
        : html`<p>No documents yet. Search to retrieve.</p>`}
    `;
  }
}

if (!customElements.get("retrieval-panel")) {
  customElements.define("retrieval-panel", RetrievalPanel);
}
