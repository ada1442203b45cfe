# mql:statement=1
# mql:kind=inspect
# mql:task=wrangle
# mql:algorithm=
# mql:data={DATA_DIR}/High_Extinction.csv
# mql:over=
# mql:seed=42
# mql:missing=zero
import numpy as np
import pandas as pd
def plain(v):
    return v.item() if hasattr(v, 'item') else v
NA_VALUES = ['', '-', 'NA', 'Na', 'nA', 'na', 'NAN', 'NAn', 'NaN', 'Nan', 'nAN', 'nAn', 'naN', 'nan']
df = pd.read_csv('{DATA_DIR}/High_Extinction.csv', keep_default_na=False, na_values=NA_VALUES)

# ShouldBe NUMERIZE AS log(ShouldBe)
x = pd.to_numeric(df['ShouldBe'])
df['ShouldBe'] = np.log(x)

# Saving the inspected table
df.to_csv('{OUT_DIR}/High_Extinction.inspected.csv', index=False)
print(f"METRIC: rows={len(df)}")
