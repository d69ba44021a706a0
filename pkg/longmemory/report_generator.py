"""
Report generation for Monte Carlo runs
"""
import io
import json
import math
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Sequence
import pandas as pd
from jinja2 import Template
import xlsxwriter
from config.config import config
from longmemory.errors import LongMemoryError
from longmemory.experiments import McReport, kde_silverman, rate_check, render_table_text, summarize_report
from utils.logger import framework_logger
from utils.series_io import atomic_write, write_frame

HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="en">
<head>
    <meta charset="UTF-8">
    <title>Whittle Monte Carlo Report</title>
    <style>
        body { font-family: 'Segoe UI', Tahoma, Geneva, Verdana, sans-serif; margin: 0; padding: 20px; background-color: #f5f5f5; }
        .container { max-width: 1200px; margin: 0 auto; background-color: white; padding: 30px; border-radius: 10px; }
        .header { text-align: center; margin-bottom: 30px; padding-bottom: 20px; border-bottom: 2px solid #4472C4; }
        .header h1 { color: #4472C4; margin: 0; }
        .section h2 { color: #333; border-bottom: 2px solid #4472C4; padding-bottom: 10px; }
        table { width: 100%; border-collapse: collapse; margin-top: 15px; }
        th, td { padding: 8px; text-align: right; border: 1px solid #ddd; }
        th { background-color: #4472C4; color: white; }
        tr:nth-child(even) { background-color: #f9f9f9; }
        .partial { color: #9C5700; font-weight: bold; }
    </style>
</head>
<body>
    <div class="container">
        <div class="header">
            <h1>Whittle Monte Carlo Report</h1>
            <p>Generated on: {{ generated_at }} | version {{ version }} | wall time {{ "%.1f"|format(wall_time) }}s</p>
        </div>
        <div class="section">
            <h2>Configuration</h2>
            <table>
                {% for key, value in provenance.items() %}
                <tr><th>{{ key }}</th><td>{{ value }}</td></tr>
                {% endfor %}
            </table>
        </div>
        <div class="section">
            <h2>Summary (mean and std of H_hat)</h2>
            {{ table_html }}
        </div>
        <div class="section">
            <h2>Cells</h2>
            <table>
                <tr><th>process</th><th>H</th><th>N</th><th>estimator</th><th>ok</th><th>mean</th><th>std</th><th>bias</th><th>RMSE</th><th>skewness</th><th>boundary</th></tr>
                {% for cell in cells %}
                <tr{% if cell.partial %} class="partial"{% endif %}>
                    <td>{{ cell.process }}</td><td>{{ cell.H }}</td><td>{{ cell.N }}</td><td>{{ cell.estimator }}</td>
                    <td>{{ cell.n_ok }}/{{ cell.replications }}</td>
                    <td>{{ fmt(cell.mean) }}</td><td>{{ fmt(cell.std) }}</td><td>{{ fmt(cell.bias) }}</td>
                    <td>{{ fmt(cell.rmse) }}</td><td>{{ fmt(cell.skewness) }}</td><td>{{ cell.boundary_warnings }}</td>
                </tr>
                {% endfor %}
            </table>
        </div>
        {% if rates_html %}
        <div class="section">
            <h2>Rate check</h2>
            {{ rates_html }}
        </div>
        {% endif %}
    </div>
</body>
</html>
"""

def _fmt(value: Optional[float]) -> str:
    return "-" if value is None or (isinstance(value, float) and math.isnan(value)) else f"{value:.4f}"

class ReportGenerator:
    """Writes the artifacts of a Monte Carlo run into one directory"""

    def __init__(self, output_dir: Optional[str] = None):
        self.output_dir = Path(output_dir or config.paths.output_dir)

    @staticmethod
    def provenance(report: McReport) -> Dict[str, Any]:
        """Config echo and seed carried by every artifact"""
        mc = report.mc_config
        return {
            "process": mc.process,
            "h_list": ",".join(f"{h:g}" for h in mc.H_list),
            "n_list": ",".join(str(n) for n in mc.N_list),
            "reps": mc.replications,
            "n_inner": mc.n_inner,
            "c": mc.C,
            "estimators": ",".join(mc.estimators),
            "seed": mc.master_seed,
            "version": report.version,
        }

    def generate_json_report(self, report: McReport, output_dir: Path) -> Path:
        """report.json with every raw estimate"""
        try:
            path = atomic_write(output_dir / "report.json", json.dumps(report.model_dump(), indent=2))
            framework_logger.info(f"JSON report generated: {path}")
            return path
        except Exception as e:
            framework_logger.error(f"Error generating JSON report: {str(e)}")
            raise

    def generate_table(self, report: McReport, output_dir: Path) -> Dict[str, Path]:
        """table.csv and its aligned-text rendering table.txt"""
        try:
            table = summarize_report(report)
            provenance = self.provenance(report)
            paths = {
                "table": write_frame(table, output_dir / "table.csv", provenance, index=True),
                "table_text": atomic_write(output_dir / "table.txt", render_table_text(table) + "\n"),
            }
            framework_logger.info(f"Summary table generated: {paths['table']}")
            return paths
        except Exception as e:
            framework_logger.error(f"Error generating summary table: {str(e)}")
            raise

    def generate_rates(self, report: McReport, output_dir: Path) -> Dict[str, Path]:
        """rates.csv (scaled dispersions) and ratios.csv (successive-N std ratios)"""
        try:
            scaled, ratios = rate_check(report)
            provenance = self.provenance(report)
            return {
                "rates": write_frame(scaled, output_dir / "rates.csv", provenance),
                "ratios": write_frame(ratios, output_dir / "ratios.csv", provenance),
            }
        except Exception as e:
            framework_logger.error(f"Error generating rate check: {str(e)}")
            raise

    def generate_kde(self, report: McReport, output_dir: Path, grid_size: Optional[int] = None) -> Dict[str, Path]:
        """kde_<H>_<N>.csv per Whittle cell (other estimators get a _<estimator> suffix)"""
        paths = {}
        provenance = self.provenance(report)
        for cell in report.cells:
            stem = f"kde_{cell.H:g}_{cell.N}" + ("" if cell.estimator == "whittle" else f"_{cell.estimator}")
            try:
                estimate = kde_silverman(cell.estimates, grid_size)
            except LongMemoryError as e:
                framework_logger.warning(f"Skipping {stem}: {e}")
                continue
            paths[stem] = write_frame(estimate.to_frame(), output_dir / f"{stem}.csv",
                                      {**provenance, "bandwidth": repr(estimate.bandwidth)})
        return paths

    def generate_html_report(self, report: McReport, output_dir: Path) -> Path:
        """report.html rendered with jinja2"""
        try:
            scaled, _ = rate_check(report)
            html_content = Template(HTML_TEMPLATE).render(
                generated_at=datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
                version=report.version,
                wall_time=report.wall_time,
                provenance=self.provenance(report),
                table_html=summarize_report(report).to_html(float_format=lambda v: f"{v:.3f}", na_rep="-"),
                cells=report.cells,
                rates_html=scaled.to_html(index=False, float_format=lambda v: f"{v:.4f}") if not scaled.empty else "",
                fmt=_fmt,
            )
            path = atomic_write(output_dir / "report.html", html_content)
            framework_logger.info(f"HTML report generated: {path}")
            return path
        except Exception as e:
            framework_logger.error(f"Error generating HTML report: {str(e)}")
            raise

    def generate_excel_report(self, report: McReport, output_dir: Path) -> Path:
        """table.xlsx: a Summary sheet (mean and std per estimator, one column per H) and a Cells sheet"""
        try:
            buffer = io.BytesIO()
            workbook = xlsxwriter.Workbook(buffer, {"in_memory": True, "nan_inf_to_errors": True})
            header_format = workbook.add_format({
                'bold': True,
                'bg_color': '#4472C4',
                'font_color': 'white',
                'border': 1
            })
            number_format = workbook.add_format({'num_format': '0.000', 'border': 1})
            partial_format = workbook.add_format({'bg_color': '#FFEB9C', 'font_color': '#9C5700', 'border': 1})

            self._create_summary_worksheet(workbook, report, header_format, number_format)
            self._create_cells_worksheet(workbook, report, header_format, number_format, partial_format)
            workbook.close()

            path = atomic_write(output_dir / "table.xlsx", buffer.getvalue())
            framework_logger.info(f"Excel report generated: {path}")
            return path
        except Exception as e:
            framework_logger.error(f"Error generating Excel report: {str(e)}")
            raise

    def _create_summary_worksheet(self, workbook, report: McReport, header_format, number_format):
        worksheet = workbook.add_worksheet('Summary')
        table = summarize_report(report)
        labels = list(table.index.names)
        for col, label in enumerate(labels + [f"H={h:g}" for h in table.columns]):
            worksheet.write(0, col, label, header_format)
        for row, (key, values) in enumerate(table.iterrows(), start=1):
            for col, part in enumerate(key):
                worksheet.write(row, col, part)
            for offset, value in enumerate(values):
                if pd.notna(value):
                    worksheet.write_number(row, len(labels) + offset, float(value), number_format)
        worksheet.set_column(0, len(labels) + len(table.columns), 12)

    def _create_cells_worksheet(self, workbook, report: McReport, header_format, number_format, partial_format):
        worksheet = workbook.add_worksheet('Cells')
        headers = ['process', 'H', 'N', 'estimator', 'n_ok', 'mean', 'std', 'bias', 'rmse', 'skewness',
                   'boundary_warnings', 'partial']
        for col, header in enumerate(headers):
            worksheet.write(0, col, header, header_format)
        for row, cell in enumerate(report.cells, start=1):
            record = cell.model_dump()
            for col, header in enumerate(headers):
                value = record[header]
                if value is None:
                    continue
                if isinstance(value, float):
                    worksheet.write_number(row, col, value, number_format)
                elif header == 'partial':
                    worksheet.write(row, col, str(value), partial_format if value else None)
                else:
                    worksheet.write(row, col, value)
        worksheet.set_column('A:L', 14)

    def generate_comprehensive_report(self, report: McReport, output_dir: Optional[str] = None,
                                      formats: Sequence[str] = ("json", "csv", "kde", "html", "xlsx")) -> Dict[str, str]:
        """
        Write every requested artifact of a Monte Carlo run

        Args:
            report: the run
            output_dir: destination directory (defaults to config.paths.output_dir)
            formats: subset of json, csv, kde, html, xlsx

        Returns:
            Dictionary mapping artifact name to path
        """
        target = Path(output_dir) if output_dir else self.output_dir
        try:
            framework_logger.info(f"Generating Monte Carlo report in {target}")
            target.mkdir(parents=True, exist_ok=True)
            paths: Dict[str, Path] = {}
            if "json" in formats:
                paths["json"] = self.generate_json_report(report, target)
            if "csv" in formats:
                paths.update(self.generate_table(report, target))
                paths.update(self.generate_rates(report, target))
            if "kde" in formats:
                paths.update(self.generate_kde(report, target))
            if "html" in formats:
                paths["html"] = self.generate_html_report(report, target)
            if "xlsx" in formats:
                paths["xlsx"] = self.generate_excel_report(report, target)
            return {name: str(path) for name, path in paths.items()}
        except Exception as e:
            framework_logger.error(f"Error generating Monte Carlo report: {str(e)}")
            raise

def load_report(path: str) -> McReport:
    """Re-read a report.json"""
    return McReport.model_validate_json(Path(path).read_text(encoding="utf-8"))

# Global report generator instance
report_generator = ReportGenerator()
