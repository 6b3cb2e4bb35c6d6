"""
Which stages to keep
====================

The reduced system lives on s fundamental stages. Taking the nodes
closest to j/(s+1) keeps the matrix C(k, s) well conditioned as k grows,
whereas simply taking the first s nodes does not.
"""

from hbvm import condition_number, make_partition

print("  k   rule of thumb    first s")
for k in range(4, 51, 6):
    good = condition_number(make_partition(k, 2).C)
    bad = condition_number(make_partition(k, 2, "first-s").C)
    print(f"{k:3d}  {good:12.3f}  {bad:12.3e}")
