"""
Design Plot
Bar chart of replication counts against dose, plus the matching (dose, count) CSV
"""

import logging
from pathlib import Path
from typing import Optional, Tuple, Union

# Set matplotlib backend before pyplot is imported
import matplotlib
matplotlib.use('Agg', force=True)
import matplotlib.pyplot as plt

from src.core.design import DesignSpace, ExactDesign
from src.utils.problem_loader import design_frame

logger = logging.getLogger(__name__)

SVG_HASH_SALT = 'las-design'


def emit_plot(design: ExactDesign, space: DesignSpace, path: Union[str, Path],
              title: str = "", csv_path: Optional[Union[str, Path]] = None) -> Tuple[Path, Path]:
    """
    Write an SVG bar chart and a CSV of the design's support.

    The CSV uses the design-file header (index, label, dose, count) so it can be
    read back with load_design. SVG bytes are identical for identical input.

    Returns:
        (svg_path, csv_path)
    """
    svg_path = Path(path)
    csv_path = Path(csv_path) if csv_path is not None else svg_path.with_suffix('.csv')
    svg_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.parent.mkdir(parents=True, exist_ok=True)

    frame = design_frame(design, space)
    frame.to_csv(csv_path, index=False)

    doses = space.values
    span = float(doses.max() - doses.min()) if space.n > 1 else 1.0
    width = max(span / max(space.n, 1) * 0.8, span * 0.008)

    with plt.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        fig, ax = plt.subplots(figsize=(8, 4))
        try:
            if not frame.empty:
                ax.bar(frame['dose'], frame['count'], width=width, color='#4a6fa5', edgecolor='black',
                       linewidth=0.5)
                for dose, count in zip(frame['dose'], frame['count']):
                    ax.annotate(str(count), (dose, count), ha='center', va='bottom', fontsize=8,
                                xytext=(0, 2), textcoords='offset points')
            margin = 0.02 * span
            ax.set_xlim(float(doses.min()) - margin, float(doses.max()) + margin)
            ax.set_ylim(0, max(1, int(frame['count'].max()) if not frame.empty else 1) * 1.15)
            ax.set_xlabel('dose')
            ax.set_ylabel('replications')
            ax.set_title(title or f"N = {design.total}, {design.support_size} support points")
            ax.grid(axis='y', alpha=0.3)
            fig.tight_layout()
            fig.savefig(svg_path, format='svg', metadata={'Date': None})
        finally:
            plt.close(fig)

    logger.info(f"Plot written to {svg_path} ({len(frame)} bars)")
    return svg_path, csv_path
