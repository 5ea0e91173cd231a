import { App } from "./app.js";
import { ProtocolClient } from "./protocol.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app root");
const endpoint = new URL("/api", window.location.origin).toString();
void new App(root, new ProtocolClient(endpoint)).start();
