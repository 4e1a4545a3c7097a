import json
from pathlib import Path

import pytest

PINNED_PATH = Path(__file__).parent / 'data' / 'pinned_values.json'


@pytest.fixture
def pinned_values():
    """
    Compara valores com os fixados em tests/data/pinned_values.json.

    Uma chave ausente é gravada na primeira execução (e deve ser versionada);
    depois disso inteiros têm de bater exatamente e floats dentro de 1e-6.
    """
    def check(key: str, values: dict):
        stored = json.loads(PINNED_PATH.read_text(encoding='utf-8')) if PINNED_PATH.exists() else {}
        if key not in stored:
            stored[key] = values
            PINNED_PATH.parent.mkdir(parents=True, exist_ok=True)
            PINNED_PATH.write_text(json.dumps(stored, indent=2, sort_keys=True), encoding='utf-8')
            return
        expected = stored[key]
        assert set(values) == set(expected)
        for name, value in values.items():
            if isinstance(value, float):
                assert value == pytest.approx(expected[name], abs=1e-6), name
            else:
                assert value == expected[name], name

    return check
