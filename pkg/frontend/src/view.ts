/** Pan/zoom view transform between map meters and canvas pixels.
 *
 * Map +y points up, canvas +y points down, so the y axis flips. All math is
 * floating point; the round trip screen -> map -> screen stays far below the
 * half-pixel budget at any zoom level.
 */

export interface ScreenPoint {
  x: number;
  y: number;
}

export interface MapPoint {
  x: number;
  y: number;
}

export class ViewTransform {
  /** map point at the canvas center */
  centerX = 0;
  centerY = 0;
  /** pixels per meter */
  scale = 80;

  constructor(
    public canvasWidth: number,
    public canvasHeight: number,
  ) {}

  mapToScreen(p: MapPoint): ScreenPoint {
    return {
      x: (p.x - this.centerX) * this.scale + this.canvasWidth / 2,
      y: this.canvasHeight / 2 - (p.y - this.centerY) * this.scale,
    };
  }

  screenToMap(p: ScreenPoint): MapPoint {
    return {
      x: (p.x - this.canvasWidth / 2) / this.scale + this.centerX,
      y: (this.canvasHeight / 2 - p.y) / this.scale + this.centerY,
    };
  }

  /** Zoom by a factor keeping the map point under `anchor` fixed on screen. */
  zoomAt(anchor: ScreenPoint, factor: number): void {
    const fixed = this.screenToMap(anchor);
    this.scale *= factor;
    const moved = this.screenToMap(anchor);
    this.centerX += fixed.x - moved.x;
    this.centerY += fixed.y - moved.y;
  }

  /** Pan by a screen-space delta in pixels. */
  panBy(dxPx: number, dyPx: number): void {
    this.centerX -= dxPx / this.scale;
    this.centerY += dyPx / this.scale;
  }

  /** Center the view on a map-space bounding box with a margin. */
  fitBounds(minX: number, minY: number, maxX: number, maxY: number, marginPx = 30): void {
    this.centerX = (minX + maxX) / 2;
    this.centerY = (minY + maxY) / 2;
    const spanX = Math.max(maxX - minX, 1e-6);
    const spanY = Math.max(maxY - minY, 1e-6);
    this.scale = Math.min(
      (this.canvasWidth - 2 * marginPx) / spanX,
      (this.canvasHeight - 2 * marginPx) / spanY,
    );
  }
}
