# %% [markdown]
# # A verification report, from Python instead of the command line

# %%
from polykern.report import config_from_dict, emit_report, run_suite

cfg = config_from_dict({"alpha": [0, 1], "lambda": [2.0, 3.0], "seed": 1, "samples": 10})
report = run_suite(cfg, "all")
print(report.overall)
print(emit_report(report, "csv-summary"))
