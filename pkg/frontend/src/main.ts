import { mountApp } from "./app";

const root = document.querySelector<HTMLElement>("#app");
if (root) {
  mountApp(root).catch((err: unknown) => {
    root.textContent = `failed to start: ${err instanceof Error ? err.message : String(err)}`;
  });
}
