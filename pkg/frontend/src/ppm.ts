/** Minimal netpbm decoder for the camera frames the service stores.
 *
 * Handles exactly what the node produces: binary P6 (color) and P5 (gray),
 * maxval up to 255. Header tokens may be separated by any whitespace and
 * interleaved with # comments, per the format spec.
 */

export interface DecodedImage {
  width: number;
  height: number;
  /** RGBA, ready for ImageData. */
  rgba: Uint8ClampedArray<ArrayBuffer>;
}

const WHITESPACE = new Set([0x20, 0x09, 0x0a, 0x0b, 0x0c, 0x0d]);

class HeaderReader {
  pos = 0;

  constructor(private readonly bytes: Uint8Array) {}

  private skipFiller(): void {
    while (this.pos < this.bytes.length) {
      const b = this.bytes[this.pos];
      if (WHITESPACE.has(b)) {
        this.pos += 1;
      } else if (b === 0x23) {
        // comment runs to end of line
        while (this.pos < this.bytes.length && this.bytes[this.pos] !== 0x0a) {
          this.pos += 1;
        }
      } else {
        return;
      }
    }
  }

  nextInt(): number {
    this.skipFiller();
    const start = this.pos;
    while (this.pos < this.bytes.length && !WHITESPACE.has(this.bytes[this.pos])) {
      this.pos += 1;
    }
    const token = new TextDecoder().decode(this.bytes.subarray(start, this.pos));
    const value = Number(token);
    if (!/^\d+$/.test(token) || !Number.isSafeInteger(value)) {
      throw new Error(`bad netpbm header token "${token}"`);
    }
    return value;
  }
}

export function decodeNetpbm(bytes: Uint8Array): DecodedImage {
  if (bytes.length < 2) throw new Error("not a binary PPM/PGM image");
  const magic = String.fromCharCode(bytes[0], bytes[1]);
  if (magic !== "P6" && magic !== "P5") {
    throw new Error("not a binary PPM/PGM image");
  }
  const reader = new HeaderReader(bytes);
  reader.pos = 2;
  const width = reader.nextInt();
  const height = reader.nextInt();
  const maxval = reader.nextInt();
  if (width < 1 || height < 1) throw new Error("bad netpbm dimensions");
  if (maxval < 1 || maxval > 255) {
    throw new Error(`unsupported netpbm maxval ${maxval}`);
  }
  // exactly one whitespace byte separates the header from the raster
  reader.pos += 1;

  const channels = magic === "P6" ? 3 : 1;
  const expected = width * height * channels;
  const raster = bytes.subarray(reader.pos, reader.pos + expected);
  if (raster.length !== expected) throw new Error("truncated netpbm raster");

  const scale = 255 / maxval;
  const rgba = new Uint8ClampedArray(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    const o = i * 4;
    if (channels === 3) {
      rgba[o] = raster[i * 3] * scale;
      rgba[o + 1] = raster[i * 3 + 1] * scale;
      rgba[o + 2] = raster[i * 3 + 2] * scale;
    } else {
      const g = raster[i] * scale;
      rgba[o] = g;
      rgba[o + 1] = g;
      rgba[o + 2] = g;
    }
    rgba[o + 3] = 255;
  }
  return { width, height, rgba };
}
