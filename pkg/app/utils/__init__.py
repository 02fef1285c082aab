from app.utils.formatting import CSV_COLUMNS, csv_row, format_float, to_csv, to_json, write_output
