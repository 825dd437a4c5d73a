"""
One annealing run per driver
============================

Run the XXZ reproduction preset once with each driver and print the
estimation error, the ground-state fidelity and where the population ends up.
"""

from symqa.annealing import run
from symqa.io import dumps_record, load_config, result_record

config = load_config(preset="xxz-fig4")
for driver in config.drivers:
    experiment = config.experiment(driver)
    result = run(experiment)
    print(f"{driver:10s} E_true={result.E_true:+.6f}  E_qa={result.E_qa:+.6f}  "
          f"error={result.estimation_error:.3e}  fidelity={result.ground_fidelity:.4f}")
    final = {m: round(p, 4) for m, p in result.sector_populations_final.items()}
    print("           final sector populations:", final)

# the JSON-lines record the CLI writes
print(dumps_record(result_record(experiment, result))[:160], "...")
