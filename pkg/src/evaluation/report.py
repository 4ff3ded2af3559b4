"""
Evaluation Reports
==================

Per-method, per-repetition index records, their aggregates, validation and
export (JSON report, tidy CSV, index plots).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import pandera as pa
from loguru import logger

from ..utils.errors import InvalidParameter
from ..utils.helpers import save_json

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    PLOTTING_AVAILABLE = True
except ImportError:
    PLOTTING_AVAILABLE = False

SCHEMA_VERSION = 1
METRICS = ('ind', 'cred_ratio', 'no_sample_ratio', 'seconds')
TIDY_COLUMNS = ['method', 'repetition', 'c', 'metric', 'value']

TIDY_SCHEMA = pa.DataFrameSchema(
    {
        'method': pa.Column(str),
        'repetition': pa.Column(int, pa.Check.ge(0), coerce=True),
        'c': pa.Column(float, pa.Check.in_range(0.1, 1.0), nullable=True, coerce=True),
        'metric': pa.Column(str, pa.Check.isin(METRICS)),
        'value': pa.Column(float, pa.Check.ge(0), nullable=True, coerce=True),
    },
    strict=True,
    ordered=True,
)


@dataclass
class EvalReport:
    """
    Evaluation results.

    Attributes:
        name: Experiment name
        rows: Tidy records (method, repetition, c, metric, value)
        errors: Failed (method, repetition) fits with their messages
        config: Settings the report was produced with
    """
    name: str
    rows: List[Dict[str, Any]] = field(default_factory=list)
    errors: List[Dict[str, Any]] = field(default_factory=list)
    config: Dict[str, Any] = field(default_factory=dict)

    def add_indices(self, method: str, repetition: int, table: pd.DataFrame) -> None:
        """Append an ``index_table`` result."""
        for record in table.itertuples(index=False):
            self.rows.append({'method': method, 'repetition': repetition, 'c': record.c, 'metric': 'ind', 'value': record.ind})
            self.rows.append({'method': method, 'repetition': repetition, 'c': record.c, 'metric': 'cred_ratio', 'value': record.cred_ratio})

    def add_scalar(self, method: str, repetition: int, metric: str, value: float) -> None:
        self.rows.append({'method': method, 'repetition': repetition, 'c': np.nan, 'metric': metric, 'value': value})

    def add_error(self, method: str, repetition: int, error: Exception) -> None:
        self.errors.append({'method': method, 'repetition': repetition, 'error': f"{type(error).__name__}: {error}"})

    def to_frame(self) -> pd.DataFrame:
        """Tidy table with one value per row."""
        return pd.DataFrame(self.rows, columns=TIDY_COLUMNS)

    def aggregate(self) -> pd.DataFrame:
        """Mean and standard deviation over repetitions per method, metric and bin."""
        frame = self.to_frame()
        if frame.empty:
            return pd.DataFrame(columns=['method', 'metric', 'c', 'mean', 'std', 'count'])
        grouped = frame.groupby(['method', 'metric', 'c'], dropna=False, sort=True)['value']
        summary = grouped.agg(['mean', 'std', 'count']).reset_index()
        return summary

    def validate(self) -> pd.DataFrame:
        """
        Check the tidy table against the report schema and check that the
        CredRatio values of every (method, repetition) sum to 1.

        Returns:
            The validated tidy table
        """
        frame = TIDY_SCHEMA.validate(self.to_frame())
        cred = frame[frame['metric'] == 'cred_ratio']
        sums = cred.groupby(['method', 'repetition'])['value'].sum()
        bad = sums[np.abs(sums - 1.0) > 1e-9]
        if len(bad):
            raise InvalidParameter(f"CredRatio does not sum to 1 for {bad.index.tolist()}")
        return frame

    def to_dict(self) -> Dict[str, Any]:
        def clean(records):
            return [{k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in r.items()} for r in records]

        return {
            'schema_version': SCHEMA_VERSION,
            'name': self.name,
            'config': self.config,
            'rows': clean(self.rows),
            'aggregate': clean(self.aggregate().to_dict(orient='records')),
            'errors': self.errors,
        }


class ReportWriter:
    """Write reports and their plots to an output directory."""

    def __init__(self, output_dir: str = "reports"):
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def save(self, report: EvalReport, filename: str = "report.json") -> Path:
        """Validate and save the JSON report plus its tidy CSV."""
        report.validate()
        path = self.output_dir / filename
        save_json(report.to_dict(), str(path))
        csv_path = path.with_suffix('.csv')
        report.to_frame().to_csv(csv_path, index=False, float_format="%.17g")
        logger.info(f"Exported tidy table to {csv_path}")
        return path

    def plot_indices(self, report: EvalReport, filename: str = "indices.png") -> Optional[Path]:
        """Mean Ind(c) and mean CredRatio(c) per method."""
        if not PLOTTING_AVAILABLE:
            logger.warning("Matplotlib not available")
            return None

        summary = report.aggregate()
        fig, axes = plt.subplots(1, 2, figsize=(14, 5))

        # Ind(c); absent bins are left out
        ax = axes[0]
        for method, group in summary[summary['metric'] == 'ind'].groupby('method'):
            group = group.dropna(subset=['mean'])
            ax.plot(group['c'], group['mean'], marker='o', label=method)
        ax.set_title('Ind(c)')
        ax.set_xlabel('c')
        ax.set_ylabel('Mean squared error')
        ax.legend()

        # CredRatio(c)
        ax = axes[1]
        cred = summary[summary['metric'] == 'cred_ratio']
        methods = sorted(cred['method'].unique())
        width = 0.08 / max(len(methods), 1)
        for i, method in enumerate(methods):
            group = cred[cred['method'] == method]
            ax.bar(group['c'] - 0.04 + (i + 0.5) * width, group['mean'], width=width, label=method)
        no_sample = summary[summary['metric'] == 'no_sample_ratio']['mean']
        if len(no_sample):
            ax.axhline(float(no_sample.mean()), color='black', linestyle='--', label='no-sample area')
        ax.set_title('CredRatio(c)')
        ax.set_xlabel('c')
        ax.set_ylabel('Area fraction')
        ax.legend()

        plt.tight_layout()
        path = self.output_dir / filename
        plt.savefig(path, dpi=150)
        plt.close(fig)
        logger.info(f"Saved index plots to {path}")
        return path

    def plot_fields(self, grid, fields: Dict[str, Any], filename: str = "bands.png") -> Optional[Path]:
        """Confidence-band maps of 2-D models side by side."""
        if not PLOTTING_AVAILABLE:
            logger.warning("Matplotlib not available")
            return None
        if grid.dim != 2:
            logger.warning("Band maps need a 2-D grid")
            return None

        fig, axes = plt.subplots(1, len(fields), figsize=(5 * len(fields), 4.5), squeeze=False)
        extent = [grid.low[0], grid.high[0], grid.low[1], grid.high[1]]
        for ax, (method, model_fields) in zip(axes[0], fields.items()):
            image = ax.imshow(
                model_fields.band.reshape(grid.shape).T, origin='lower', extent=extent, vmin=0, vmax=1
            )
            ax.set_title(method)
            ax.set_xlabel('x0')
            ax.set_ylabel('x1')
            fig.colorbar(image, ax=ax)

        plt.tight_layout()
        path = self.output_dir / filename
        plt.savefig(path, dpi=150)
        plt.close(fig)
        logger.info(f"Saved band maps to {path}")
        return path


__all__ = ['SCHEMA_VERSION', 'METRICS', 'TIDY_SCHEMA', 'EvalReport', 'ReportWriter', 'PLOTTING_AVAILABLE']
