import { ApiClient } from "./api.js";
import { createApp } from "./app.js";

// same-origin by default; set window.RPKT_API_BASE before loading to point elsewhere
declare global {
  interface Window {
    RPKT_API_BASE?: string;
  }
}

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
createApp(root, new ApiClient(window.RPKT_API_BASE ?? ""));
