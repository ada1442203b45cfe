# mql:statement=1
# mql:kind=generate
# mql:task=PREDICTION
# mql:algorithm=LinearRegression
# mql:data={DATA_DIR}/bostonHomes.csv
# mql:over={DATA_DIR}/homesNew.csv
# mql:seed=42
# mql:missing=impute
import numpy as np
import pandas as pd
def plain(v):
    return v.item() if hasattr(v, 'item') else v
NA_VALUES = ['', '-', 'NA', 'Na', 'nA', 'na', 'NAN', 'NAn', 'NaN', 'Nan', 'nAN', 'nAn', 'naN', 'nan']
df = pd.read_csv('{DATA_DIR}/bostonHomes.csv', keep_default_na=False, na_values=NA_VALUES)
from sklearn.model_selection import train_test_split
from sklearn.linear_model import LinearRegression
from sklearn.metrics import mean_squared_error, r2_score

# Extracting features CRIM, ZN, NOX, DIS, TAX, PTRATIO and target MEDV
FEATURES = ['CRIM', 'ZN', 'NOX', 'DIS', 'TAX', 'PTRATIO']
TARGET = 'MEDV'
df = df.dropna(subset=FEATURES + [TARGET]).reset_index(drop=True)
X = df[FEATURES]
y = df[TARGET]

# Splitting the data into training and testing sets
X_train, X_test, y_train, y_test = train_test_split(X, y,
  test_size=0.2, random_state=42)

# Creating a LinearRegression model
model = LinearRegression()

# Training the model
model.fit(X_train, y_train)

# Making predictions on the test set
y_pred = model.predict(X_test)

# Evaluating the model
mse = mean_squared_error(y_test, y_pred)
print("Mean Squared Error:", mse)
print(f"METRIC: mse={plain(mse)!r}")
print(f"METRIC: r2={plain(r2_score(y_test, y_pred))!r}")

# Printing the coefficients of the model
print("Coefficients:", model.coef_)

# Printing the intercept of the model
print("Intercept:", model.intercept_)

# Test set prediction
from sklearn.impute import SimpleImputer
test_samples = pd.read_csv('{DATA_DIR}/homesNew.csv', keep_default_na=False, na_values=NA_VALUES)
imputer = SimpleImputer(strategy='median')
imputer.fit(X_train)
X_test_imputed = imputer.transform(test_samples[FEATURES])
X_test_imputed_df = pd.DataFrame(X_test_imputed,
  columns=FEATURES)
predictions = model.predict(X_test_imputed_df)
# Printing the predictions
print("Predictions for the", len(predictions), "test samples:", predictions)
for p in predictions:
    print(f"PRED: {plain(p)!r}")

# Saving the bar plot
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
bar_labels = test_samples['HomeNo'].tolist()
plt.figure()
plt.bar([str(v) for v in bar_labels], predictions)
plt.xlabel('HomeNo')
plt.ylabel('MEDV')
plt.savefig('{OUT_DIR}/stmt01_bar.png')
