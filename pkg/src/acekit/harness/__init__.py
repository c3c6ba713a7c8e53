"""Monte Carlo harness, CSV ingestion and output writers."""

from acekit.harness.density import ps_density
from acekit.harness.export import export_dataset_csv, write_summary
from acekit.harness.ingest import CsvTable, hot_deck_impute, ingest_csv
from acekit.harness.methods import EstimationContext, get_method
from acekit.harness.runner import run_experiment

__all__ = [
    "CsvTable",
    "EstimationContext",
    "export_dataset_csv",
    "get_method",
    "hot_deck_impute",
    "ingest_csv",
    "ps_density",
    "run_experiment",
    "write_summary",
]
