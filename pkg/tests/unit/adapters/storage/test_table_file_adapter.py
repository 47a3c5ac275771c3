from pathlib import Path
from typing import List

import pytest

from src.adapters.storage.table_file_adapter import MANIFEST_PREFIX, TableFileAdapter
from src.common.dto import RunManifest, TrialResult


@pytest.fixture
def rows() -> List[TrialResult]:
    return [
        TrialResult(
            method="shotgun",
            density=0.1,
            trial=trial,
            success=trial % 2 == 0,
            steps=12 + trial,
            path_len_m=13.5,
            init_dist_m=13.0,
            final_dist_m=0.3,
        )
        for trial in range(3)
    ]


class TestTableFileAdapter:
    def test_round_trip_with_manifest(
        self, tmp_path: Path, rows: List[TrialResult]
    ) -> None:
        # Arrange
        path = str(tmp_path / "local.csv")
        manifest = RunManifest(subcommand="bench-local", seed=0, tool_version="0.1.0")

        # Act
        TableFileAdapter().write(path, rows, TrialResult, manifest)
        loaded = TableFileAdapter().read(path, TrialResult)

        # Assert
        lines = Path(path).read_text().splitlines()
        assert lines[0].startswith(MANIFEST_PREFIX)
        assert lines[1].split(",")[:3] == ["method", "density", "trial"]
        assert loaded == rows

    def test_dash_writes_to_stdout(
        self, capsys: pytest.CaptureFixture[str], rows: List[TrialResult]
    ) -> None:
        # Act
        TableFileAdapter().write("-", rows, TrialResult)

        # Assert
        output = capsys.readouterr().out.splitlines()
        assert len(output) == 4
        assert output[1].startswith("shotgun,0.1,0,True,12")
