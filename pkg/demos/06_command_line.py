# %% [markdown]
# The command-line runner
#
# A JSON config names the triples; everything else has defaults. Reports are
# newline-delimited JSON, profiles are CSV.

# %%
import json
import tempfile
from pathlib import Path

from magucp.cli import main, read_report

work = Path(tempfile.mkdtemp())
config = work / "run.json"
config.write_text(json.dumps({
    "triples": [{"name": "harmonic2d", "params": {"k": 2}}, {"name": "gaussian"}],
    "grid": {"r_min": 0.05, "r_max": 0.95, "step": 0.025},
}))

# %%
code = main(["verify", "--config", str(config), "--out", str(work / "verify.jsonl")])
header, records = read_report(work / "verify.jsonl")
print("exit", code, "| header", header)
print(records[0])

# %%
code = main(["profile", "--config", str(config), "--csv-dir", str(work / "csv")])
print("exit", code)
