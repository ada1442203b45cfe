# mql:statement=1
# mql:kind=generate
# mql:task=CLUSTER
# mql:algorithm=KMeans
# mql:data={DATA_DIR}/bostonHomes.csv
# mql:over=
# mql:seed=42
# mql:missing=zero
import numpy as np
import pandas as pd
def plain(v):
    return v.item() if hasattr(v, 'item') else v
NA_VALUES = ['', '-', 'NA', 'Na', 'nA', 'na', 'NAN', 'NAn', 'NaN', 'Nan', 'nAN', 'nAn', 'naN', 'nan']
df = pd.read_csv('{DATA_DIR}/bostonHomes.csv', keep_default_na=False, na_values=NA_VALUES)
from sklearn.model_selection import train_test_split
from sklearn.pipeline import make_pipeline; from sklearn.preprocessing import StandardScaler; from sklearn.cluster import KMeans
from sklearn.metrics import silhouette_score

# Extracting features RM, LSTAT
FEATURES = ['RM', 'LSTAT']
df = df.dropna(subset=FEATURES).reset_index(drop=True)
X = df[FEATURES]
y = pd.Series(0, index=X.index)

# Clustering uses every row
X_train, y_train = X, y
X_test, y_test = X, y

# Creating a KMeans model
model = make_pipeline(StandardScaler(), KMeans(n_clusters=3, n_init=10, random_state=42))

# Training the model
model.fit(X_train, y_train)

# Making predictions on the test set
y_pred = model.predict(X_test)

# Evaluating the clustering on standardized features
Z = model[:-1].transform(X_test)
silhouette = silhouette_score(Z, y_pred) if len(set(y_pred)) > 1 else 0.0
print("Silhouette:", silhouette)
print(f"METRIC: silhouette={plain(silhouette)!r}")

# Cluster assignments for every row
predictions = y_pred
for p in predictions:
    print(f"PRED: {plain(p)!r}")
