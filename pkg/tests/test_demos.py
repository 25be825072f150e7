import runpy
from pathlib import Path

import pytest

DEMOS = Path(__file__).resolve().parent.parent / "demos"


@pytest.mark.parametrize(
    "script, needle",
    [
        ("01_ghz_basis.py", "orthonormal: True"),
        ("02_worked_example.py", "measured 101"),
        ("05_n_party.py", "all exact: True"),
    ],
)
def test_demo_runs(script, needle, capsys):
    runpy.run_path(str(DEMOS / script), run_name="__main__")
    assert needle in capsys.readouterr().out


def test_demo_configs_load():
    from ghz_qsdc import load_spec

    for path in sorted((DEMOS / "configs").glob("*.yaml")):
        load_spec(path)
