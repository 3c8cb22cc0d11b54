/** Server-side SVG rendering via the ECharts SSR mode (no DOM needed). */

import * as echarts from "echarts";
import type { BuiltChart } from "./options.js";

export function renderSvg(chart: BuiltChart, width = 900, height = 540): string {
  const instance = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width,
    height,
  });
  try {
    instance.setOption({ animation: false, ...chart.option });
    return instance.renderToSVGString();
  } finally {
    instance.dispose();
  }
}
