import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { formatProbability, renderDiagram, renderWhatIfPanel } from "../src/render.js";
import type { DiagramDoc, MeasureResponse } from "../src/types.js";

interface Recorded {
  url: string;
  method: string;
  body: unknown;
}

function fakeFetch(responder: (url: string, init?: RequestInit) => [number, unknown]) {
  const calls: Recorded[] = [];
  const impl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method ?? "GET",
      body: init?.body ? JSON.parse(init.body as string) : undefined,
    });
    const [status, payload] = responder(url, init);
    return new Response(JSON.stringify(payload), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { calls, impl };
}

const tinyDiagram: DiagramDoc = {
  components: [{ rings: [{ id: 2, status: "active", mark: null }], ribbons: [] }],
  events: [],
};

describe("request shapes", () => {
  it("create, measure, undo, delete hit the documented endpoints", async () => {
    const { calls, impl } = fakeFetch(() => [200, { ok: true }]);
    const api = new ApiClient("http://svc", impl);
    await api.createSession(5, 7).catch(() => undefined);
    await api.measure("abc", 3, "Y", "random");
    await api.whatIf("abc", 3, "X");
    await api.undo("abc");
    await api.deleteSession("abc");
    expect(calls.map((c) => [c.method, c.url])).toEqual([
      ["POST", "http://svc/sessions"],
      ["POST", "http://svc/sessions/abc/measure"],
      ["POST", "http://svc/sessions/abc/measure"],
      ["POST", "http://svc/sessions/abc/undo"],
      ["DELETE", "http://svc/sessions/abc"],
    ]);
    expect(calls[1].body).toEqual({ qubit: 3, basis: "Y", outcome: "random", dry_run: false });
    expect(calls[2].body).toEqual({ qubit: 3, basis: "X", dry_run: true });
  });

  it("structured errors become ApiError", async () => {
    const { impl } = fakeFetch(() => [404, { code: "unknown_session", message: "no session" }]);
    const api = new ApiClient("", impl);
    await expect(api.getSession("nope")).rejects.toThrowError(ApiError);
    await api.getSession("nope").catch((e: ApiError) => {
      expect(e.status).toBe(404);
      expect(e.code).toBe("unknown_session");
    });
  });
});

describe("zero client-side physics", () => {
  it("every displayed number is read off the wire, never recomputed", async () => {
    // Deliberately non-physical numbers: a client computing Born-rule
    // values could never produce these; they can only appear in the UI if
    // the UI echoes the service response.
    const wireResponse: MeasureResponse = {
      committed: false,
      step: null,
      outcomes: {
        "+": {
          possible: true,
          probability: 0.1234,
          rule: "Y_Bulk_Twist",
          event: { kind: "TwistSpliceRight", qubit: 3 },
          diagram: tinyDiagram,
        },
        "-": {
          possible: true,
          probability: 0.8766,
          rule: "Y_Bulk_AntiTwist",
          event: { kind: "TwistSpliceLeft", qubit: 3 },
          diagram: tinyDiagram,
        },
      },
      diagram: null,
      byproducts: null,
      schmidt: null,
      fidelity: null,
      correspondence_ok: null,
    };
    const { calls, impl } = fakeFetch(() => [200, wireResponse]);
    const api = new ApiClient("", impl);
    const response = await api.whatIf("sid", 3, "Y");

    const html = renderWhatIfPanel(response.outcomes!);
    expect(html).toContain("0.1234");
    expect(html).toContain("0.8766");
    expect(html).not.toContain("0.5000"); // the physically correct value, absent on purpose
    expect(html).toContain("TwistSpliceRight");

    // the preview diagrams are verbatim renders of the wire documents
    expect(html).toContain(renderDiagram(tinyDiagram));

    // and the panel needed exactly one request: no hidden computation round trips
    expect(calls.length).toBe(1);
  });

  it("probability formatting is presentation only", () => {
    expect(formatProbability(0.1234)).toBe("0.1234");
    expect(formatProbability(1)).toBe("1.0000");
  });
});
