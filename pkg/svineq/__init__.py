# Singular-value inequality toolkit
