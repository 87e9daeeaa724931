from cli.commands import discrete_command, lab_command, normal_command, symbol_command
from cli.config import OperatorConfig, RunConfig, load_config, merge_run, operator_to_json, parse_config
from cli.reports import build_id, read_matrix, write_matrix, write_table
from cli.suites import tolerance_names, verify_all
