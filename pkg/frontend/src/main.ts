import { ApiClient } from "./api.js";
import { Store } from "./store.js";
import type { AppShell } from "./components/app-shell.js";
import "./components/app-shell.js";

// Same-origin by default; override with ?api=http://host:port
const base = new URLSearchParams(window.location.search).get("api") ?? "";
const store = new Store(new ApiClient(base));

const app = document.createElement("plansum-app") as AppShell;
app.store = store;
document.body.appendChild(app);

void store.init();
