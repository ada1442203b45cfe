# mql:statement=1
# mql:kind=construct
# mql:task=PREDICTION
# mql:algorithm=RandomForest
# mql:data={DATA_DIR}/DyeData.csv
# mql:over=
# mql:seed=42
# mql:missing=zero
import numpy as np
import pandas as pd
def plain(v):
    return v.item() if hasattr(v, 'item') else v
NA_VALUES = ['', '-', 'NA', 'Na', 'nA', 'na', 'NAN', 'NAn', 'NaN', 'Nan', 'nAN', 'nAn', 'naN', 'nan']
df = pd.read_csv('{DATA_DIR}/DyeData.csv', keep_default_na=False, na_values=NA_VALUES)
from sklearn.model_selection import train_test_split
from sklearn.ensemble import RandomForestRegressor
from sklearn.metrics import mean_squared_error, r2_score

# Extracting features conj_length, n_rings, homo_lumo_gap, dipole, mol_weight, n_hetero and target epsilon
FEATURES = ['conj_length', 'n_rings', 'homo_lumo_gap', 'dipole', 'mol_weight', 'n_hetero']
TARGET = 'epsilon'
df = df.dropna(subset=FEATURES + [TARGET]).reset_index(drop=True)
X = df[FEATURES]
y = df[TARGET]

# Splitting the data into 7040 training and 1760 testing rows
X_train, X_test, y_train, y_test = train_test_split(X, y,
  train_size=7040, test_size=1760, random_state=42)

# Creating a RandomForest model
model = RandomForestRegressor(n_estimators=100, max_depth=10, min_samples_leaf=2, max_features="sqrt", random_state=42)

# Training the model
model.fit(X_train, y_train)

# Making predictions on the test set
y_pred = model.predict(X_test)

# Evaluating the model
mse = mean_squared_error(y_test, y_pred)
print("Mean Squared Error:", mse)
print(f"METRIC: mse={plain(mse)!r}")
print(f"METRIC: r2={plain(r2_score(y_test, y_pred))!r}")

# Saving the model as epsilonPred
import joblib
joblib.dump(model, '{OUT_DIR}/stmt01_epsilonPred.joblib')
print(f"METRIC: saved=epsilonPred")
