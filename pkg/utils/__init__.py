from utils.schemas import (DualSpec, ExplicitBasesSpec, GraphFunctionSpec, GraphicSpec, HyperedgeSpec,
                           HypergraphFunctionSpec, InstanceFile, InstanceRequest, LaminarSpec, Metadata, PartitionSpec,
                           PavingSpec, RankFunctionSpec, SolveRequest, TableFunctionSpec, TruncationSpec, UniformSpec)
