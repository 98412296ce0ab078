import { Dashboard } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const dashboard = new Dashboard(root, "");
  void dashboard.start();
}
