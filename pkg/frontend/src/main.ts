import { ApiClient } from "./api.js";
import { App, queryElements } from "./app.js";
import { SessionController } from "./state.js";

const api = new ApiClient("");
const controller = new SessionController((imageId, method, clicks, classId, signal) =>
  api.segment(imageId, method, clicks, classId, signal),
);

const app = new App(api, controller, queryElements(document));
void app.start();
