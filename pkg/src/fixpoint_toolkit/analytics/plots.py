from pathlib import Path
from typing import Dict, List, Sequence
import logging

import plotly.graph_objects as go

from ..data.trace_csv import atomic_write_text
from ..schemes.iteration import IterationTrace
from ..schemes.types import SchemeKind

logger = logging.getLogger(__name__)

CHART_DIV_ID = "fixpoint-convergence"


class ConvergencePlotter:
    """Writes convergence charts for a set of traces stored in a CSV file."""

    def __init__(self, traces: Dict[SchemeKind, IterationTrace], csv_name: str):
        """
        Args:
            traces: Traces keyed by scheme, in the order they should be drawn.
            csv_name: File name of the trace CSV the gnuplot script reads,
                relative to the script's own directory.
        """
        if not traces:
            raise ValueError("Nothing to plot: no traces given.")
        self.traces = traces
        self.csv_name = csv_name

    def _metric_column(self) -> str:
        # err needs p on every trace; residual is always available
        if all(trace.fixed_point is not None for trace in self.traces.values()):
            return "err"
        return "residual"

    def gnuplot_script(self) -> str:
        """
        Build a gnuplot script plotting the chosen metric against n, one line
        per scheme, on a logarithmic y axis.
        """
        metric = self._metric_column()
        column = 4 if metric == "err" else 5
        lines: List[str] = [
            'set datafile separator ","',
            "set key autotitle columnhead",
            "set logscale y",
            'set xlabel "n"',
            f'set ylabel "{metric}"',
            "set format y \"%.0e\"",
            "set key outside right",
        ]
        plots = []
        for kind in self.traces:
            # rows of other schemes become undefined and are skipped
            selector = f'(strcol(2) eq "{kind.value}" && ${column} > 0 ? ${column} : 1/0)'
            plots.append(
                f'"{self.csv_name}" using 1:{selector} with linespoints title "{kind.value}"'
            )
        lines.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(lines) + "\n"

    def write_gnuplot(self, path: Path) -> Path:
        atomic_write_text(Path(path), self.gnuplot_script())
        logger.info("Wrote gnuplot script %s", path)
        return Path(path)

    def figure(self) -> go.Figure:
        """Interactive log-scale convergence chart, one trace per scheme."""
        metric = self._metric_column()
        fig = go.Figure()
        for kind, trace in self.traces.items():
            values = trace.errors() if metric == "err" else trace.residuals()
            points = [(r.n, v) for r, v in zip(trace.records, values) if v is not None and v > 0]
            fig.add_trace(go.Scatter(
                x=[n for n, _ in points],
                y=[v for _, v in points],
                mode="lines+markers",
                name=kind.value,
            ))
        fig.update_layout(
            title=f"Convergence on {next(iter(self.traces.values())).map_name}",
            xaxis_title="n",
            yaxis_title=metric,
            yaxis_type="log",
            template="plotly_white",
        )
        return fig

    def write_html(self, path: Path) -> Path:
        """Save the chart as a standalone HTML file with a fixed div id."""
        html = self.figure().to_html(
            include_plotlyjs="cdn", full_html=True, div_id=CHART_DIV_ID
        )
        atomic_write_text(Path(path), html)
        logger.info("Wrote HTML report %s", path)
        return Path(path)


def ordering_summary(schemes: Sequence[SchemeKind], iterations: Dict[SchemeKind, object]) -> List[str]:
    """One 'scheme: iterations' line per scheme, 'unreached' when the tolerance was missed."""
    return [
        f"{kind.value}: {iterations[kind] if iterations[kind] is not None else 'unreached'}"
        for kind in schemes
    ]
