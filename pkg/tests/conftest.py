import pytest

from spheroid_spectrum import ModelParams, solve_stationary

# parameter sets whose larger root stays below ~9, where the FD oracle is sharp
ORACLE_PARAMS = (
    ModelParams(sigma_bar=1.0, sigma_tilde=0.3, mu=1.0, gamma=0.1),
    ModelParams(sigma_bar=2.0, sigma_tilde=1.0, mu=1.0, gamma=0.2),
    ModelParams(sigma_bar=1.0, sigma_tilde=0.6, mu=2.0, gamma=0.05),
    ModelParams(sigma_bar=1.5, sigma_tilde=0.9, mu=0.5, gamma=0.3),
)

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def default_params():
    return ORACLE_PARAMS[0]


@pytest.fixture
def default_states(default_params):
    return solve_stationary(default_params)


@pytest.fixture
def record_criterion():
    """Record a one-line PASS/FAIL verdict, printed in the terminal summary."""

    def record(number: int, title: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        line = f"[{status}] criterion {number}: {title}"
        if detail:
            line += f" ({detail})"
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
