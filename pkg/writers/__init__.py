"""
Writers: CSV trajectories, JSON theory reports and the SVG comparison figure.
"""

from writers.csv_writer import CsvWriter
from writers.report_writer import ReportWriter
from writers.svg_writer import SvgWriter

__all__ = ["CsvWriter", "ReportWriter", "SvgWriter"]
