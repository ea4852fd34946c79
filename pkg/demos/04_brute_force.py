# %% [markdown]
# # Exhaustive search is cheap too
#
# With L known only 2^24 keys remain, and a wrong key almost always fails
# on its first byte or two.

# %%
import numpy as np

from dsea import REFERENCE_KEY, encrypt
from dsea.bruteforce import KeySpace, cost_model, search_with_summary
from dsea.cipher import SecretKey, first_mismatch

g = np.random.default_rng(0).integers(0, 256, 64, dtype=np.uint8)
c = encrypt(g, REFERENCE_KEY)

rng = np.random.default_rng(1)
stops = [first_mismatch(g, c, SecretKey(15, *rng.integers(0, 256, 3).tolist())) for _ in range(2000)]
print("mean bytes checked before rejection:", np.mean([s + 1 for s in stops if s is not None]))

# %%
found, summary = search_with_summary(KeySpace(range(15, 16)), g, c)
print("found:", *found)
print(summary.to_text())

# %% [markdown]
# Over all L the space is M * 2^24 keys, each costing at most M bytes.

# %%
for m in (64, 4096, 65536):
    s = cost_model(m)
    print(f"M={m:6d}: model 2^{s.model_log2:.1f}, claimed 2^{s.claimed_log2:.0f}")
