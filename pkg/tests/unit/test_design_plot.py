"""
Unit tests for design plots
"""

from src.core.design import DesignSpace, ExactDesign
from src.utils import load_design
from src.visualization.design_plot import emit_plot

SPACE = DesignSpace.grid(0, 100, 101)


class TestEmitPlot:
    """SVG and CSV outputs"""

    def test_outputs_exist(self, references, tmp_path):
        svg, csv = emit_plot(references['w0'], SPACE, tmp_path / "w0.svg", title="w0")
        assert svg.exists() and csv == tmp_path / "w0.csv"
        assert svg.read_text().lstrip().startswith("<?xml")

    def test_identical_bytes(self, references, tmp_path):
        first, _ = emit_plot(references['w5'], SPACE, tmp_path / "a" / "w5.svg")
        second, _ = emit_plot(references['w5'], SPACE, tmp_path / "b" / "w5.svg")
        assert first.read_bytes() == second.read_bytes()

    def test_csv_reads_back(self, references, tmp_path):
        _, csv = emit_plot(references['w3'], SPACE, tmp_path / "w3.svg", csv_path=tmp_path / "data" / "w3.csv")
        assert load_design(csv, 101) == references['w3']

    def test_empty_design(self, tmp_path):
        svg, csv = emit_plot(ExactDesign.zeros(101), SPACE, tmp_path / "empty.svg")
        assert svg.exists()
        assert load_design(csv, 101) == ExactDesign.zeros(101)
