import re


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One line per acceptance criterion in the run summary."""
    results = {}
    for status, word in (("passed", "PASS"), ("failed", "FAIL"),
                         ("error", "FAIL"), ("skipped", "SKIPPED")):
        for rep in terminalreporter.stats.get(status, []):
            mm = re.search(r"test_criterion_(\d+)", getattr(rep, "nodeid", ""))
            if mm:
                results[int(mm.group(1))] = word
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for num in sorted(results):
            terminalreporter.write_line(f"criterion {num}: {results[num]}")
