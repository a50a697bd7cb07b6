"""Scenario files, the example catalog, reports and the command line."""

from .catalog import CATALOG, CatalogEntry, catalog_ids, catalog_scenario
from .emit import emit, to_csv, to_json
from .runner import VERDICTS, Report, run
from .schema import Scenario, TensorForm, load_scenario, parse_scenario, scenario_to_dict

__all__ = [
    "CATALOG", "CatalogEntry", "catalog_ids", "catalog_scenario", "emit", "to_csv", "to_json",
    "VERDICTS", "Report", "run", "Scenario", "TensorForm", "load_scenario", "parse_scenario",
    "scenario_to_dict",
]
