import importlib
import json

import pytest

from src.errors import ConfigError
from src.loader import COMMANDS_PATH, bind_handler, load_commands, load_figures
from src.router import CommandRouter


# Mock handler functions for testing purposes
def mock_run_command(args):
    return 0


def mock_reproduce_command(args):
    return 0


def mock_tune_command(args, report_file):
    return f"tuned_{report_file}"


def mock_theory_report_command(args, warmup_trials=30):
    return warmup_trials


class TestLoader:

    # Provides a fresh CommandRouter instance for each test.
    @pytest.fixture
    def router_instance(self):
        return CommandRouter()

    # Mocks the handler modules and their functions using mocker.
    @pytest.fixture
    def mock_handlers_modules(self, mocker):
        original_import_module = importlib.import_module

        mock_experiment_handlers = mocker.Mock()
        mock_experiment_handlers.run_command = mock_run_command
        mock_experiment_handlers.reproduce_command = mock_reproduce_command
        mock_experiment_handlers.tune_command = mock_tune_command

        mock_theory_handlers = mocker.Mock()
        mock_theory_handlers.theory_report_command = mock_theory_report_command

        def mock_import_module(module_name):
            handler_modules = {
                "src.handlers.experiment_handlers": mock_experiment_handlers,
                "src.handlers.theory_handlers": mock_theory_handlers,
            }
            if module_name in handler_modules:
                return handler_modules[module_name]
            return original_import_module(module_name)

        mocker.patch("importlib.import_module", side_effect=mock_import_module)
        yield

    #### LOAD_COMMANDS() TESTS ####
    # Test loading a valid commands file registers every command with bound args.
    def test_load_commands_valid_config(self, mocker, router_instance, mock_handlers_modules):
        mock_config = {
            "commands": [
                {"command": "run", "handler": "run_command"},
                {"command": "reproduce", "handler": "reproduce_command"},
                {"command": "tune", "handler": "tune_command", "handler_args": ["tuning.json"]},
                {"command": "theory-report", "handler": "theory_report_command", "handler_args": {"warmup_trials": 40}},
            ]
        }
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps(mock_config)))

        load_commands(router_instance, "dummy_path.json")

        # Handlers without args are stored as themselves.
        assert router_instance.get_handler("run")[0] is mock_run_command
        assert router_instance.get_handler("reproduce")[0] is mock_reproduce_command

        bound_tune, _ = router_instance.get_handler("tune")
        assert bound_tune(mocker.Mock()) == "tuned_tuning.json"
        bound_theory, _ = router_instance.get_handler("theory-report")
        assert bound_theory(mocker.Mock()) == 40

    # Test that the shipped commands file wires all four commands to real handlers.
    def test_load_commands_shipped_config(self, router_instance):
        load_commands(router_instance, COMMANDS_PATH)
        assert router_instance.names() == ["reproduce", "run", "theory-report", "tune"]
        for name in router_instance.names():
            assert callable(router_instance.get_handler(name)[0])

    # Test handling of a missing commands file.
    def test_load_commands_missing_file(self, mocker, router_instance):
        mocker.patch("builtins.open", side_effect=FileNotFoundError)

        with pytest.raises(ConfigError, match="not found"):
            load_commands(router_instance, "missing.json")
        assert not router_instance.commands

    # Test handling of malformed JSON.
    def test_load_commands_malformed_json(self, mocker, router_instance):
        mocker.patch("builtins.open", mocker.mock_open(read_data='{"commands": [not valid json}'))

        with pytest.raises(ConfigError, match="Invalid JSON"):
            load_commands(router_instance, "bad.json")
        assert not router_instance.commands

    # Test handling of a config without the 'commands' key.
    def test_load_commands_no_commands_key(self, mocker, router_instance):
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps({"other_key": []})))

        with pytest.raises(ConfigError, match="Missing 'commands' key"):
            load_commands(router_instance, "other.json")

    # Test handling of a config where 'commands' is not a list.
    def test_load_commands_not_list(self, mocker, router_instance):
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps({"commands": "run"})))

        with pytest.raises(ConfigError, match="must be a list"):
            load_commands(router_instance, "other.json")

    # Test that unknown handlers and malformed entries are skipped with a warning.
    def test_load_commands_skips_bad_entries(self, mocker, router_instance, mock_handlers_modules, caplog):
        mock_config = {
            "commands": [
                {"command": "serve", "handler": "serve_static_file"},
                {"handler": "run_command"},
                {"command": "run"},
                {"command": "run", "handler": "run_command"},
            ]
        }
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps(mock_config)))

        with caplog.at_level("WARNING"):
            load_commands(router_instance, "dummy.json")

        assert router_instance.names() == ["run"]
        assert "Handler 'serve_static_file' not found for command serve" in caplog.text
        assert "Skipping malformed command entry" in caplog.text

    # Test that a handler module failing to import surfaces as a ConfigError.
    def test_load_commands_import_error(self, mocker, router_instance):
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps({"commands": []})))
        mocker.patch("importlib.import_module", side_effect=ImportError("boom"))

        with pytest.raises(ConfigError, match="Error importing handler modules"):
            load_commands(router_instance, "dummy.json")

    #### LOAD_FIGURES() TESTS ####
    # Test that the pinned figure file holds all six figures.
    def test_load_figures_shipped(self):
        figures = load_figures()
        assert sorted(figures) == ["fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c"]
        assert figures["fig3c"]["model"]["lam"] == 0.3
        assert figures["fig3c"]["graph"]["num_agents"] == 30

    # Test that a figure file with non-object entries is rejected.
    def test_load_figures_invalid_structure(self, mocker):
        mocker.patch("builtins.open", mocker.mock_open(read_data=json.dumps({"fig2a": [1, 2]})))

        with pytest.raises(ConfigError):
            load_figures("figures.json")

    #### BIND_HANDLER() TESTS ####
    # Test bind_handler when no handler_args are provided.
    def test_bind_handler_no_args(self, mocker):

        def original_handler(args):
            return "no_args"

        bound = bind_handler(original_handler, None)
        assert bound is original_handler
        assert bound(mocker.Mock()) == "no_args"

    # Test bind_handler with dictionary handler_args.
    def test_bind_handler_dict_args(self, mocker):

        def original_handler(args, param1, param2):
            return f"dict_args_{param1}_{param2}"

        bound = bind_handler(original_handler, {"param1": "value1", "param2": "value2"})
        assert bound(mocker.Mock()) == "dict_args_value1_value2"

    # Test bind_handler with list handler_args.
    def test_bind_handler_list_args(self, mocker):

        def original_handler(args, param1, param2):
            return f"list_args_{param1}_{param2}"

        bound = bind_handler(original_handler, ["valueA", "valueB"])
        assert bound(mocker.Mock()) == "list_args_valueA_valueB"

    # Test bind_handler with a single, non-list/dict argument.
    def test_bind_handler_single_arg(self, mocker):

        def original_handler(args, param):
            return f"single_arg_{param}"

        bound = bind_handler(original_handler, "single_value")
        assert bound(mocker.Mock()) == "single_arg_single_value"
