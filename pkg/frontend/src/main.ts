import { App } from "./app";

const root = document.getElementById("app");
if (root) {
  root.textContent = "";
  void new App(root).init().catch((error: unknown) => {
    root.textContent = `failed to load: ${String(error)}`;
  });
}
