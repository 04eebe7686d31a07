"""Unit tests for the command-line front end."""

import json

import pytest

from cyclic_formation.cli import (
    EXIT_FATAL,
    EXIT_INPUT,
    EXIT_NOT_CERTIFIED,
    EXIT_OK,
    build_parser,
    main,
)
from cyclic_formation.core.subspace import regular_polygon
from cyclic_formation.simulation.export import CERTIFICATION_FILE, METRICS_FILE
from cyclic_formation.simulation.scenario import (
    CollisionSpec,
    emit_scenario,
    parse_scenario,
)
from cyclic_formation.simulation.shapes import shape_names


class TestParser:
    """Tests for argument parsing."""

    def test_overrides(self):
        """Override flags should be parsed with their types."""
        args = build_parser().parse_args(
            ["simulate", "hexagon", "--seed", "3", "--dt", "0.01", "--t-end", "2"]
        )

        assert (args.seed, args.dt, args.t_end) == (3, 0.01, 2.0)

    def test_command_required(self):
        """A missing subcommand should exit with usage."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_version(self, capsys):
        """--version should print the version and exit 0."""
        with pytest.raises(SystemExit) as exc:
            main(["--version"])

        assert exc.value.code == 0
        assert capsys.readouterr().out.strip()


class TestCertify:
    """Tests for the certify command."""

    def test_hexagon_certified(self, capsys):
        """The reference hexagon should exit 0 and print its rate."""
        code = main(["certify", "hexagon"])

        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "contraction rate: 6.9282" in out
        assert "certified: yes" in out

    @pytest.mark.parametrize("name", ["tau_too_large", "zero_gain"])
    def test_negative_controls(self, name, capsys):
        """Scenarios violating a condition should exit 1."""
        assert main(["certify", name]) == EXIT_NOT_CERTIFIED
        assert "certified: no" in capsys.readouterr().out

    def test_writes_certification(self, tmp_path):
        """--out should write certification.json."""
        main(["certify", "size_polygon", "--out", str(tmp_path)])

        data = json.loads((tmp_path / CERTIFICATION_FILE).read_text())
        assert data["tau_bound"] == pytest.approx(0.5)

    def test_malformed_file(self, tmp_path, capsys):
        """A malformed scenario file should exit 3 with its location."""
        path = tmp_path / "broken.json"
        path.write_text('{\n  "name": "x",\n  oops\n}\n')

        code = main(["certify", str(path)])

        assert code == EXIT_INPUT
        assert "broken.json:3" in capsys.readouterr().err

    def test_missing_scenario(self, capsys):
        """An unknown scenario should exit 3."""
        assert main(["certify", "no-such-scenario"]) == EXIT_INPUT
        assert "error:" in capsys.readouterr().err

    def test_bad_override(self, capsys):
        """An override breaking the lag grid should exit 3."""
        assert main(["certify", "size_polygon", "--dt", "0.05"]) == EXIT_INPUT


class TestSimulate:
    """Tests for the simulate command."""

    def test_writes_outputs(self, tmp_path, capsys):
        """A short run should exit 0 and write its files."""
        code = main(["simulate", "hexagon", "--t-end", "0.1", "--out", str(tmp_path)])

        assert code == EXIT_OK
        assert (tmp_path / METRICS_FILE).exists()
        assert (tmp_path / CERTIFICATION_FILE).exists()
        assert "status: completed" in capsys.readouterr().out

    def test_default_output_dir(self, output_dir):
        """Without --out the run should land under the output directory."""
        assert main(["simulate", "hexagon", "--t-end", "0.05"]) == EXIT_OK

        assert (output_dir / "hexagon" / METRICS_FILE).exists()

    def test_collision_is_fatal(self, scenario_factory, tmp_path):
        """A run that ends in a collision should exit 2."""
        positions = [tuple(p) for p in regular_polygon(6, side=2.0).reshape(6, 3)]
        x0, y0, z0 = positions[0]
        positions[1] = (x0 + 0.1, y0, z0)
        scenario = scenario_factory(
            collision=CollisionSpec(),
            initial__kind="positions",
            initial__positions_m=positions,
        )
        path = tmp_path / "crash.json"
        path.write_text(emit_scenario(scenario))

        code = main(["simulate", str(path), "--out", str(tmp_path / "out")])

        assert code == EXIT_FATAL


class TestMonteCarlo:
    """Tests for the montecarlo command."""

    def test_campaign(self, tmp_path, capsys):
        """A small campaign should exit 0 and report its sample count."""
        code = main(
            [
                "montecarlo",
                "hexagon",
                "--samples",
                "2",
                "--t-end",
                "0.05",
                "--out",
                str(tmp_path),
            ]
        )

        assert code == EXIT_OK
        assert "samples: 2" in capsys.readouterr().out
        assert (tmp_path / "runs.csv").exists()

    def test_collision_is_fatal(self, scenario_factory, tmp_path, capsys):
        """A campaign with a colliding run should exit 2."""
        positions = [tuple(p) for p in regular_polygon(6, side=2.0).reshape(6, 3)]
        x0, y0, z0 = positions[0]
        positions[1] = (x0 + 0.1, y0, z0)
        scenario = scenario_factory(
            collision=CollisionSpec(),
            initial__kind="positions",
            initial__positions_m=positions,
        )
        path = tmp_path / "crash.json"
        path.write_text(emit_scenario(scenario))

        code = main(
            [
                "montecarlo",
                str(path),
                "--samples",
                "1",
                "--radius",
                "0",
                "--out",
                str(tmp_path / "out"),
            ]
        )

        assert code == EXIT_FATAL
        assert "collisions: 1" in capsys.readouterr().out


class TestShapes:
    """Tests for the shapes command."""

    def test_list(self, capsys):
        """shapes list should print every shape name."""
        assert main(["shapes", "list"]) == EXIT_OK

        assert capsys.readouterr().out.split() == shape_names()

    def test_emit_stdout(self, capsys):
        """shapes emit should print a valid scenario."""
        assert main(["shapes", "emit", "cube", "--side", "2"]) == EXIT_OK

        scenario = parse_scenario(capsys.readouterr().out)
        assert scenario.formation.side_m == 2.0

    def test_emit_file(self, tmp_path):
        """shapes emit --out should write the skeleton to a file."""
        out = tmp_path / "dome.json"

        assert main(["shapes", "emit", "dome", "--out", str(out)]) == EXIT_OK

        assert parse_scenario(out.read_text()).formation.kind == "polyhedron"

    def test_unknown_shape(self, capsys):
        """An unknown shape should exit 3."""
        assert main(["shapes", "emit", "icosahedron"]) == EXIT_INPUT
