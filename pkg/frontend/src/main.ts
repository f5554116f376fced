// Bootstrap: read the service base URL and session coordinates from the
// query string, e.g. ?api=http://localhost:8000&campaign=camp1&assessor=anna
// (or ?token=... to resume). Without parameters a small launch form asks
// for them and reloads with the query set.

import { ApiClient } from "./api.js";
import { App } from "./app.js";

function launchForm(root: HTMLElement): void {
  root.innerHTML = `
    <main data-screen="launch">
      <h2>Join an assessment session</h2>
      <form id="launch">
        <label>Service URL <input name="api" value="${location.origin}"></label>
        <label>Campaign id <input name="campaign" required></label>
        <label>Your assessor id <input name="assessor" required></label>
        <button type="submit">Start</button>
      </form>
    </main>`;
  root.querySelector("#launch")!.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(event.target as HTMLFormElement);
    const params = new URLSearchParams({
      api: String(data.get("api") || ""),
      campaign: String(data.get("campaign") || ""),
      assessor: String(data.get("assessor") || ""),
    });
    location.search = params.toString();
  });
}

export function boot(root: HTMLElement): App | null {
  const params = new URLSearchParams(location.search);
  const api = new ApiClient(params.get("api") ?? "", undefined);
  const token = params.get("token");
  const campaign = params.get("campaign");
  const assessor = params.get("assessor");
  if (token) {
    const app = new App(api, root, localStorage);
    void app.resume(token);
    return app;
  }
  if (campaign && assessor) {
    const app = new App(api, root, localStorage);
    void app.startSession(campaign, assessor);
    return app;
  }
  launchForm(root);
  return null;
}

const rootElement = document.getElementById("app");
if (rootElement) {
  boot(rootElement);
}
