import { describe, expect, it } from "vitest";

import { encodeClientFrame, parseServerFrame } from "../src/protocol.js";

describe("frame codec", () => {
  it("parses known server frames", () => {
    const frame = parseServerFrame(
      '{"type":"adaptation","from":"small","to":"medium","t_ms":120}',
    );
    expect(frame).toEqual({ type: "adaptation", from: "small", to: "medium", t_ms: 120 });
  });

  it("turns garbage into error frames instead of throwing", () => {
    expect(parseServerFrame("not json").type).toBe("error");
    expect(parseServerFrame('{"no_type":1}').type).toBe("error");
    expect(parseServerFrame('{"type":"martian"}').type).toBe("error");
  });

  it("encodes client frames as single-line json", () => {
    const line = encodeClientFrame({ type: "gaze", t_ms: 33, x: 1.5, y: 2.5 });
    expect(line).toBe('{"type":"gaze","t_ms":33,"x":1.5,"y":2.5}');
    expect(line).not.toContain("\n");
  });
});
