import { SentinelClient } from "./api.js";
import { ConsoleApp } from "./app.js";

const DEFAULT_SERVICE = "http://127.0.0.1:8080";

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  return (fromQuery ?? DEFAULT_SERVICE).replace(/\/+$/, "");
}

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
new ConsoleApp(root, new SentinelClient(serviceBaseUrl()));
