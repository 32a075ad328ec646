# cs	suffix root	allomorph graph	derivation graph
CS_N1	N_V
CS_N2	N_C
CS_V1	V_V
CS_V2	V_C
CS_V3	V_V	EuDropV
CS_V3k	EO
CS_A1	A_V	EuDropA	AdvGe
CS_A1k	EO
CS_A2	A_C	-	AdvGe
CS_ADV	ADVG
CS_DET	NONE
