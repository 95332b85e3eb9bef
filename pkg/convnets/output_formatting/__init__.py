from .tables import shape_chain_table, schedule_table, curve_table
from .tables import loss_report_table, dataset_table, gradcheck_table
from .tables import comparison_table, dictionary_table
from .architecture_plot import ArchitectureGraphPlot
