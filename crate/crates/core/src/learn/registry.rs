use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::MlType;

/// Every native algorithm, in registry order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    LinearRegression,
    Ridge,
    DecisionTree,
    RandomForest,
    #[serde(rename = "KNN")]
    Knn,
    KMeans,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::LinearRegression,
        Algorithm::Ridge,
        Algorithm::DecisionTree,
        Algorithm::RandomForest,
        Algorithm::Knn,
        Algorithm::KMeans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LinearRegression => "LinearRegression",
            Algorithm::Ridge => "Ridge",
            Algorithm::DecisionTree => "DecisionTree",
            Algorithm::RandomForest => "RandomForest",
            Algorithm::Knn => "KNN",
            Algorithm::KMeans => "KMeans",
        }
    }

    /// Case-insensitive lookup.
    pub fn lookup(name: &str) -> Option<Algorithm> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(name))
    }

    pub fn supports(self, ml: MlType) -> bool {
        use Algorithm::*;
        match ml {
            MlType::Pred => matches!(self, LinearRegression | Ridge | DecisionTree | RandomForest | Knn),
            MlType::Class => matches!(self, DecisionTree | RandomForest | Knn),
            MlType::Clus => self == KMeans,
        }
    }

    pub fn default_for(ml: MlType) -> Algorithm {
        match ml {
            MlType::Pred => Algorithm::LinearRegression,
            MlType::Class => Algorithm::DecisionTree,
            MlType::Clus => Algorithm::KMeans,
        }
    }

    /// Algorithms swept by best-model search, in registry order.
    pub fn candidates(ml: MlType) -> Vec<Algorithm> {
        Self::ALL.into_iter().filter(|a| a.supports(ml)).collect()
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_ignores_case_but_not_spelling() {
        assert_eq!(Algorithm::lookup("randomforest"), Some(Algorithm::RandomForest));
        assert_eq!(Algorithm::lookup("RandonForest"), None);
    }

    #[test]
    fn five_prediction_candidates() {
        assert_eq!(Algorithm::candidates(MlType::Pred).len(), 5);
        assert_eq!(Algorithm::candidates(MlType::Clus), [Algorithm::KMeans]);
        assert!(!Algorithm::KMeans.supports(MlType::Pred));
        for ml in [MlType::Pred, MlType::Class, MlType::Clus] {
            assert!(Algorithm::default_for(ml).supports(ml));
        }
    }
}
